"""Binary instance containers and state dumps.

Instance file layout (all little-endian)::

    magic   4 bytes  b"SPKT"
    version uint16
    n       uint32
    q       uint32
    lambda  float64
    seed    uint64
    u       n x int8 (+1 / -1)
    w       n^q x float64

A JSON sidecar ``<path>.json`` repeats the header fields plus a SHA-256 of the
binary file.  State dumps are an 8-byte ``n`` (uint64) followed by interleaved
``(re, im)`` float64 pairs.
"""

from __future__ import annotations

import hashlib
import json
import struct
from pathlib import Path

import numpy as np

from .model import SpikedTensorInstance
from .statevector import StateVector

MAGIC = b"SPKT"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sHIIdQ")


def save_instance(instance: SpikedTensorInstance, path: str | Path) -> Path:
    path = Path(path)
    header = _HEADER.pack(MAGIC, FORMAT_VERSION, instance.n, instance.q, instance.lam, instance.seed)
    blob = header + instance.u.astype("<i1").tobytes() + instance.w.astype("<f8").tobytes()
    path.write_bytes(blob)
    meta = {
        "format": "spiked-tensor-instance",
        "version": FORMAT_VERSION,
        "n": instance.n,
        "q": instance.q,
        "lambda": instance.lam,
        "seed": instance.seed,
        "noise_entries": int(instance.w.size),
        "sha256": hashlib.sha256(blob).hexdigest(),
    }
    sidecar = path.with_name(path.name + ".json")
    sidecar.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return path


def load_instance(path: str | Path, *, verify: bool = True) -> SpikedTensorInstance:
    """Read an instance file; with ``verify`` a sidecar, when present, must match its checksum."""
    path = Path(path)
    blob = path.read_bytes()
    if len(blob) < _HEADER.size:
        raise ValueError(f"{path} is too short to be an instance file")
    magic, version, n, q, lam, seed = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise ValueError(f"{path} is not an instance file")
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported instance format version {version}")
    off = _HEADER.size
    if len(blob) != off + n + 8 * n**q:
        raise ValueError(f"{path} is truncated or has trailing bytes")
    sidecar = path.with_name(path.name + ".json")
    if verify and sidecar.exists():
        expected = json.loads(sidecar.read_text()).get("sha256")
        if expected != hashlib.sha256(blob).hexdigest():
            raise ValueError(f"checksum mismatch between {path} and its sidecar")
    u = np.frombuffer(blob, dtype="<i1", count=n, offset=off)
    w = np.frombuffer(blob, dtype="<f8", count=n**q, offset=off + n)
    return SpikedTensorInstance(n=n, q=q, lam=lam, u=u.copy(), w=w.copy(), seed=seed)


def dump_state(state: StateVector, path: str | Path) -> None:
    body = np.empty(2 * state.amp.size, dtype="<f8")
    body[0::2] = state.amp.real
    body[1::2] = state.amp.imag
    Path(path).write_bytes(struct.pack("<Q", state.n) + body.tobytes())


def load_state(path: str | Path) -> StateVector:
    blob = Path(path).read_bytes()
    (n,) = struct.unpack_from("<Q", blob)
    body = np.frombuffer(blob, dtype="<f8", offset=8)
    if body.size != 2 << n:
        raise ValueError("state dump length does not match its header")
    return StateVector(int(n), body[0::2] + 1j * body[1::2])
