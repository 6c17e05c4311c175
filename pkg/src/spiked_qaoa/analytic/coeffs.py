"""Depth-p sine-Gaussian coefficients ``(a_p, b_p)`` via the configuration-string iteration.

Configuration strings have ``2p+1`` entries ordered
``(z_1, ..., z_p, z_0, z_{-p}, ..., z_{-1})``.  Forward and backward branches of
the QAOA sandwich meet at ``z_0``; the ``H`` matrices are refined ``p`` times and
then contracted into the amplitude coefficients ``a_r``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import CapacityError
from .scaling import epsilon_p

DEFAULT_MAX_DEPTH = 7


def position(label: int, p: int) -> int:
    """Array column of the string entry ``z_label`` for ``label`` in ``-p..p``."""
    if label > 0:
        return label - 1
    if label == 0:
        return p
    return 2 * p + 1 + label


@dataclass(frozen=True)
class CoeffTables:
    p: int
    q: int
    f: np.ndarray  # (2^{2p+1},) complex
    H: tuple[np.ndarray, ...]  # H^[0..p], each (2p+1, 2p+1)
    a_r: np.ndarray
    b_r: np.ndarray

    @property
    def a(self) -> float:
        return float(self.a_r[-1].real)

    @property
    def b(self) -> float:
        return float(self.b_r[-1])


def _strings(p: int) -> np.ndarray:
    width = 2 * p + 1
    idx = np.arange(1 << width)[:, None]
    return (1 - 2 * ((idx >> np.arange(width)) & 1)).astype(np.float64)


def _amplitude_table(z: np.ndarray, p: int, betas: np.ndarray) -> np.ndarray:
    """``f(z)``: half the product of single-qubit mixer matrix elements along the string."""

    def element(a, b, beta, sign):
        return np.where(a == b, np.cos(beta), sign * 1j * np.sin(beta))

    col = lambda label: z[:, position(label, p)]  # noqa: E731
    f = np.full(z.shape[0], 0.5, dtype=np.complex128)
    for r in range(1, p):
        f *= element(col(r), col(r + 1), betas[r - 1], 1)
    f *= element(col(p), col(0), betas[p - 1], 1)
    f *= element(col(0), col(-p), betas[p - 1], -1)
    for r in range(p - 1, 0, -1):
        f *= element(col(-(r + 1)), col(-r), betas[r - 1], -1)
    return f


def _signed_gammas(p: int, gammas: np.ndarray) -> np.ndarray:
    g = np.zeros(2 * p + 1)
    for r in range(1, p + 1):
        g[position(r, p)] = gammas[r - 1]
        g[position(-r, p)] = -gammas[r - 1]
    return g


def _weights(z: np.ndarray, kernel: np.ndarray, q: int) -> np.ndarray:
    """``exp(-q/2 sum_{jk} kernel_jk z_j z_k)`` per string."""
    quad = np.einsum("sj,jk,sk->s", z, kernel, z)
    return np.exp(-0.5 * q * quad)


def coeff_engine(p: int, q: int, gammas, betas, *, max_p: int = DEFAULT_MAX_DEPTH) -> CoeffTables:
    if p < 1:
        raise ValueError("p must be positive")
    if p > max_p:
        raise CapacityError(f"depth p={p} exceeds the engine cap of {max_p}")
    gammas = np.asarray(gammas, dtype=np.float64).reshape(-1)
    betas = np.asarray(betas, dtype=np.float64).reshape(-1)
    if gammas.size != p or betas.size != p:
        raise ValueError("gammas and betas must have length p")

    z = _strings(p)
    f = _amplitude_table(z, p, betas)
    g = _signed_gammas(p, gammas)
    gg = np.outer(g, g)

    h = (z * f[:, None]).T @ z
    tables = [h]
    for _ in range(p):
        w = _weights(z, h ** (q - 1) * gg, q)
        h = (z * (f * w)[:, None]).T @ z
        tables.append(h)

    final = _weights(z, h ** (q - 1) * gg, q) * f
    a = np.empty(p, dtype=np.complex128)
    for r in range(1, p + 1):
        nxt = 0 if r == p else r + 1
        nxt_neg = 0 if r == p else -(r + 1)
        col = lambda label: z[:, position(label, p)]  # noqa: E731
        term = (col(r) * col(nxt) - col(-r) * col(nxt_neg)) / 2
        for s in range(r + 1, p + 1):
            term = term * (1 + col(s) * col(-s)) / 2
        a[r - 1] = 1j * np.sum(final * term)

    b = np.empty(p)
    b[0] = 2 * q * gammas[0]
    for r in range(2, p + 1):
        b[r - 1] = 2 * q * gammas[r - 1] * ((a[r - 2] * b[r - 2]) ** (q - 1)).real
    return CoeffTables(p=p, q=q, f=f, H=tuple(tables), a_r=a, b_r=b)


def enhancement_factor(p: int, q: int, gammas, betas, *, max_p: int = DEFAULT_MAX_DEPTH) -> float:
    """``|a_p b_p|^{eps_p}``."""
    t = coeff_engine(p, q, gammas, betas, max_p=max_p)
    return float(abs(t.a_r[-1] * t.b_r[-1]) ** epsilon_p(p, q))
