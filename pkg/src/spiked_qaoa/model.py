"""Spiked tensor instances, the likelihood cost over bitstrings, and overlaps.

Bitstrings are int8 arrays of +-1.  The state-vector index of ``z`` is
``sum_j 2^(j-1) (1 - z_j)/2`` over qubits ``j = 1..n``, i.e. bit ``j-1`` of the
index is set exactly when ``z_j = -1``; the all-ones string sits at index 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import CapacityError
from .rng import stream

DEFAULT_MAX_ENTRIES = 2**31
DEFAULT_MAX_QUBITS = 26


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class SpikedTensorInstance:
    """Observation ``Y = lam/n^(q/2) u^{(x)q} + W/sqrt(n)`` kept as its two factors.

    ``w`` is the flat row-major noise tensor with ``n**q`` entries; ``Y`` itself is
    never formed.
    """

    n: int
    q: int
    lam: float
    u: np.ndarray
    w: np.ndarray
    seed: int = 0
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.q < 2:
            raise ValueError("q must be at least 2")
        if not self.lam >= 0:
            raise ValueError("lambda must be nonnegative")
        u = np.asarray(self.u, dtype=np.int8)
        w = np.asarray(self.w, dtype=np.float64).reshape(-1)
        if u.shape != (self.n,) or not np.all(np.abs(u) == 1):
            raise ValueError("u must be a length-n vector of +-1")
        if w.size != self.n**self.q:
            raise ValueError(f"w must have n^q = {self.n ** self.q} entries, got {w.size}")
        if not np.all(np.isfinite(w)):
            raise ValueError("w must be finite")
        object.__setattr__(self, "u", _frozen(u))
        object.__setattr__(self, "w", _frozen(w))
        object.__setattr__(self, "lam", float(self.lam))

    @property
    def noise(self) -> np.ndarray:
        """The noise tensor as an ``(n,)*q`` read-only view."""
        return self.w.reshape((self.n,) * self.q)


def generate_instance(n: int, q: int, lam: float, seed: int, *, max_entries: int = DEFAULT_MAX_ENTRIES) -> SpikedTensorInstance:
    if n < 1 or q < 2:
        raise ValueError("need n >= 1 and q >= 2")
    if n**q > max_entries:
        raise CapacityError(f"n^q = {n ** q} exceeds the cap of {max_entries} noise entries")
    u = stream(seed, "signal").integers(0, 2, size=n, dtype=np.int8) * 2 - 1
    w = stream(seed, "noise").standard_normal(n**q)
    return SpikedTensorInstance(n=n, q=q, lam=lam, u=u.astype(np.int8), w=w, seed=seed)


def gauge_transform(instance: SpikedTensorInstance, s: np.ndarray) -> SpikedTensorInstance:
    """Flip signs: ``u -> u*s`` and ``W_J -> W_J * s_{j1}...s_{jq}``."""
    s = np.asarray(s, dtype=np.int8)
    w = instance.noise.copy()
    for axis in range(instance.q):
        shape = [1] * instance.q
        shape[axis] = instance.n
        w = w * s.reshape(shape)
    return SpikedTensorInstance(
        n=instance.n, q=instance.q, lam=instance.lam, u=instance.u * s, w=w, seed=instance.seed
    )


def _check_bits(z, n: int) -> np.ndarray:
    z = np.asarray(z)
    if z.shape != (n,):
        raise ValueError(f"bitstring length {z.shape} does not match n={n}")
    return z


def cost(instance: SpikedTensorInstance, z) -> float:
    """``C(z) = n^{-(q-2)/2} <Y, z^{(x)q}>`` with signal and noise contracted separately."""
    n, q = instance.n, instance.q
    zf = _check_bits(z, n).astype(np.float64)
    t = instance.noise
    for _ in range(q):
        t = t @ zf
    signal = instance.lam / n ** (q / 2) * float(instance.u @ zf) ** q
    return float((signal + float(t) / np.sqrt(n)) / n ** ((q - 2) / 2))


def overlap(z, u) -> float:
    z, u = np.asarray(z), np.asarray(u)
    if z.shape != u.shape:
        raise ValueError("overlap needs equal-length vectors")
    return float(np.dot(z.astype(np.float64), u)) / z.size


def index_of(z) -> int:
    z = np.asarray(z)
    return int(np.sum((z == -1).astype(np.int64) << np.arange(z.size, dtype=np.int64)))


def bitstring_at(index: int, n: int) -> np.ndarray:
    bits = (index >> np.arange(n)) & 1
    return (1 - 2 * bits).astype(np.int8)


def all_bitstrings(n: int) -> np.ndarray:
    """``(2^n, n)`` array; row ``i`` is the bitstring stored at index ``i``."""
    idx = np.arange(1 << n)[:, None]
    return (1 - 2 * ((idx >> np.arange(n)) & 1)).astype(np.int8)


def signal_bits(u) -> int:
    """Index of ``u`` viewed as a bitstring."""
    return index_of(u)


def noise_monomials(instance: SpikedTensorInstance) -> tuple[np.ndarray, np.ndarray]:
    """Reduce the noise part of the cost to a multilinear polynomial.

    Since ``z_j^2 = 1`` each multi-index ``J`` contributes to the monomial over the
    indices appearing an odd number of times; XOR-ing one-hot masks computes that set.
    Returns ``(masks, coefs)`` with unique masks, coefficients already scaled by
    ``n^{-(q-1)/2}``.
    """
    n, q = instance.n, instance.q
    idx = np.indices((n,) * q, dtype=np.uint64).reshape(q, -1)
    masks = np.bitwise_xor.reduce(np.uint64(1) << idx, axis=0)
    uniq, inverse = np.unique(masks, return_inverse=True)
    coefs = np.bincount(inverse.ravel(), weights=instance.w, minlength=uniq.size)
    return uniq, coefs / n ** ((q - 1) / 2)


def signal_table(instance: SpikedTensorInstance) -> np.ndarray:
    """Signal part of the cost as a function of the agreement count ``m``."""
    n, q = instance.n, instance.q
    m = np.arange(n + 1, dtype=np.float64)
    return instance.lam * (2 * m - n) ** q / n ** (q - 1)


def _incidence(masks: np.ndarray, coefs: np.ndarray, n: int):
    keep = masks != 0
    masks, coefs = masks[keep], coefs[keep]
    ptr = np.zeros(n + 1, dtype=np.int64)
    others, weights = [], []
    for i in range(n):
        bit = np.uint64(1 << i)
        hit = (masks & bit) != 0
        others.append(masks[hit] ^ bit)
        weights.append(coefs[hit])
        ptr[i + 1] = ptr[i] + hit.sum()
    return (
        ptr,
        np.ascontiguousarray(np.concatenate(others), dtype=np.uint64),
        np.ascontiguousarray(np.concatenate(weights), dtype=np.float64),
    )


def cost_diagonal(instance: SpikedTensorInstance, *, max_n: int = DEFAULT_MAX_QUBITS) -> np.ndarray:
    """Cost of every bitstring, in state-vector index order.

    The noise polynomial is tracked along a Gray-code walk so each step only
    touches monomials containing the flipped bit; the signal term is looked up
    from the running agreement count.  The result is cached on the instance.
    """
    n = instance.n
    if n > max_n or n > 62:
        raise CapacityError(f"n={n} exceeds the simulator cap of {max_n} qubits")
    cached = instance._cache.get("diag")
    if cached is not None:
        return cached
    masks, coefs = noise_monomials(instance)
    ptr, others, weights = _incidence(masks, coefs, n)
    diag = kernels.cost_diagonal(
        n, ptr, others, weights, float(coefs.sum()), signal_table(instance), signal_bits(instance.u)
    )
    diag = _frozen(np.asarray(diag))
    instance._cache["diag"] = diag
    return diag
