"""Counter-based random streams keyed by (seed, purpose tag, indices).

Every stream is an independent Philox generator whose key is derived from the
tuple, so a sweep draws the same numbers for instance ``i`` no matter which
worker runs it or in which order.
"""

from __future__ import annotations

import zlib

import numpy as np

MAX_SEED = 2**64 - 1


def tag_id(tag: str) -> int:
    return zlib.crc32(tag.encode("utf-8"))


def stream(seed: int, tag: str, *indices: int) -> np.random.Generator:
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    if any(i < 0 for i in indices):
        raise ValueError("stream indices must be nonnegative")
    seq = np.random.SeedSequence(entropy=seed, spawn_key=(tag_id(tag), *indices))
    return np.random.Generator(np.random.Philox(seq))


def derive_seed(seed: int, tag: str, *indices: int) -> int:
    """A 64-bit child seed, for handing to APIs that take a seed rather than a stream."""
    seq = np.random.SeedSequence(entropy=seed, spawn_key=(tag_id(tag), *indices))
    return int(seq.generate_state(1, dtype=np.uint64)[0])
