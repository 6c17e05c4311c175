"""Classical baselines: tensor power iteration (plain, rounded, biased start) and unfolding.

Contractions run over the last ``q-1`` slots of the tensor.  Because ``W`` is not
symmetrised this choice matters for individual instances, though not for any
limiting law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError
from .model import DEFAULT_MAX_ENTRIES, SpikedTensorInstance


@dataclass
class PowerIterTrace:
    iterates: list[np.ndarray] = field(default_factory=list)
    overlaps: list[float] = field(default_factory=list)
    seed: int = 0
    degenerate: bool = False


def tensor_contract(instance: SpikedTensorInstance, v) -> np.ndarray:
    """``Y[v^{(x)(q-1)}]``, i.e. component ``i`` is ``sum Y_{i j2..jq} v_j2 ... v_jq``."""
    n, q = instance.n, instance.q
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (n,):
        raise ValueError(f"vector length {v.shape} does not match n={n}")
    t = instance.noise
    for _ in range(q - 1):
        t = t @ v
    signal = instance.lam / n ** (q / 2) * float(instance.u @ v) ** (q - 1)
    return signal * instance.u + t / math.sqrt(n)


def _normalise(y: np.ndarray, n: int) -> np.ndarray | None:
    norm = float(np.linalg.norm(y))
    if norm == 0 or not math.isfinite(norm):
        return None
    return math.sqrt(n) * y / norm


def power_iteration(instance: SpikedTensorInstance, steps: int, init, *, seed: int = 0) -> PowerIterTrace:
    """``u_k = sqrt(n) Y[u_{k-1}^{(q-1)}] / ||Y[u_{k-1}^{(q-1)}]||`` for ``k = 1..steps``."""
    v = np.asarray(init, dtype=np.float64)
    if steps < 1:
        raise ValueError("steps must be positive")
    if not np.linalg.norm(v) > 0:
        raise ValueError("initial vector must be nonzero")
    trace = PowerIterTrace(seed=seed)
    u = instance.u.astype(np.float64)
    for _ in range(steps):
        nxt = _normalise(tensor_contract(instance, v), instance.n)
        if nxt is None:
            trace.degenerate = True
            break
        v = nxt
        trace.iterates.append(v)
        trace.overlaps.append(float(u @ v) / instance.n)
    return trace


def implicit_power_iteration(
    u, q: int, lam: float, steps: int, init, rng: np.random.Generator
) -> PowerIterTrace:
    """Power iteration on a fresh Gaussian instance, sampled without storing ``W``.

    Row ``i`` of the unfolded noise is an isotropic Gaussian vector, and the
    contraction at step ``k`` only observes its projection on
    ``x_k = v_k^{(x)(q-1)}``, with ``<x_j, x_k> = (v_j . v_k)^{q-1}``.  Each new
    projection is drawn from its Gaussian law conditional on the earlier ones,
    which reproduces the joint law of the iterates exactly.
    """
    u = np.asarray(u, dtype=np.float64)
    n = u.size
    v = np.asarray(init, dtype=np.float64)
    dirs: list[np.ndarray] = []
    noise: list[np.ndarray] = []
    trace = PowerIterTrace()
    for _ in range(steps):
        cross = np.array([float(d @ v) ** (q - 1) for d in dirs])
        self_ip = float(v @ v) ** (q - 1)
        if dirs:
            gram = np.array([[float(a @ b) ** (q - 1) for b in dirs] for a in dirs])
            coef = np.linalg.lstsq(gram, cross, rcond=None)[0]
            mean = coef @ np.array(noise)
            var = max(self_ip - float(cross @ coef), 0.0)
        else:
            mean, var = 0.0, self_ip
        h = mean + math.sqrt(var) * rng.standard_normal(n)
        dirs.append(v)
        noise.append(h)
        y = lam / n ** (q / 2) * float(u @ v) ** (q - 1) * u + h / math.sqrt(n)
        nxt = _normalise(y, n)
        if nxt is None:
            trace.degenerate = True
            break
        v = nxt
        trace.iterates.append(v)
        trace.overlaps.append(float(u @ v) / n)
    return trace


def random_init(n: int, rng: np.random.Generator) -> np.ndarray:
    """Gaussian vector rescaled to norm ``sqrt(n)`` (uniform direction)."""
    g = rng.standard_normal(n)
    return math.sqrt(n) * g / np.linalg.norm(g)


def biased_init(u, k: int, delta: float, rng: np.random.Generator) -> np.ndarray:
    """Entries ``+-u_j/sqrt(n)``, agreeing with ``u`` w.p. ``(1 + (k/n) sin 2delta)/2``."""
    u = np.asarray(u, dtype=np.float64)
    n = u.size
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    if not 0 <= delta <= math.pi / 4:
        raise ValueError("delta must lie in [0, pi/4]")
    agree = rng.random(n) < 0.5 * (1 + (k / n) * math.sin(2 * delta))
    return np.where(agree, u, -u) / math.sqrt(n)


def round_sign(v) -> np.ndarray:
    """Entrywise sign with ``sign(0) = +1``."""
    return np.where(np.asarray(v) >= 0, 1, -1).astype(np.int8)


def unfold_spectral(
    instance: SpikedTensorInstance,
    steps: int,
    rng: np.random.Generator,
    *,
    gram_steps: int = 200,
    max_entries: int = DEFAULT_MAX_ENTRIES,
) -> np.ndarray:
    """Spectral estimate from the ``n^{q/2} x n^{q/2}`` unfolding of an even-order tensor.

    Matrix power iteration on the unfolding, then the top left singular vector of
    the result reshaped to ``n x n^{q/2-1}``, rescaled to norm ``sqrt(n)``.
    """
    n, q = instance.n, instance.q
    if q % 2:
        raise ValueError("unfolding needs an even tensor order")
    half = n ** (q // 2)
    if half * half > max_entries:
        raise CapacityError("unfolded matrix exceeds the memory cap")
    w_bar = instance.w.reshape(half, half)
    u_half = instance.u.astype(np.float64)
    for _ in range(q // 2 - 1):
        u_half = np.kron(u_half, instance.u)
    scale = instance.lam / n ** (q / 2)

    def apply(x):
        return scale * float(u_half @ x) * u_half + w_bar @ x / math.sqrt(n)

    x = rng.standard_normal(half)
    x /= np.linalg.norm(x)
    for _ in range(steps):
        x = apply(x)
        x /= np.linalg.norm(x)
    m = x.reshape(n, half // n)
    gram = m @ m.T
    y = rng.standard_normal(n)
    for _ in range(gram_steps):
        y = gram @ y
        norm = np.linalg.norm(y)
        if norm == 0:
            break
        y /= norm
    return math.sqrt(n) * y / np.linalg.norm(y)
