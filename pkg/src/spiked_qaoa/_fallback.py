"""Pure numpy implementations of the kernels in ``_kernels.pyx``.

Same call signatures.  The cost diagonal here is built by a fast Walsh-Hadamard
transform of the multilinear coefficients rather than a Gray-code walk, so the
two backends double as cross-checks of each other.
"""

from __future__ import annotations

import numpy as np


def _popcount(x: np.ndarray) -> np.ndarray:
    return np.bitwise_count(x)


def cost_diagonal(n, ptr, others, coef, start, signal, ubits):
    # Recover one coefficient per monomial mask from the per-bit incidence lists.
    size = 1 << n
    dense = np.zeros(size, dtype=np.float64)
    ptr = np.asarray(ptr)
    for i in range(n):
        sl = slice(ptr[i], ptr[i + 1])
        masks = np.asarray(others[sl], dtype=np.uint64) | np.uint64(1 << i)
        # each monomial appears once per member bit; keep it only at its lowest bit
        low = (masks & (~masks + np.uint64(1))) == np.uint64(1 << i)
        np.add.at(dense, masks[low].astype(np.int64), np.asarray(coef[sl])[low])
    dense[0] = start - dense[1:].sum()
    _walsh_hadamard(dense, n)
    idx = np.arange(size, dtype=np.uint64)
    agree = n - _popcount(idx ^ np.uint64(ubits)).astype(np.int64)
    return dense + np.asarray(signal)[agree]


def _walsh_hadamard(x: np.ndarray, n: int) -> None:
    for qubit in range(n):
        v = x.reshape(-1, 2, 1 << qubit)
        a = v[:, 0, :].copy()
        b = v[:, 1, :]
        v[:, 0, :] = a + b
        v[:, 1, :] = a - b


def apply_phase(amp, diag, gamma):
    amp *= np.exp(-1j * gamma * np.asarray(diag))


def apply_mixer(amp, n, beta):
    c, s = np.cos(beta), np.sin(beta)
    for qubit in range(n):
        v = amp.reshape(-1, 2, 1 << qubit)
        a = v[:, 0, :].copy()
        b = v[:, 1, :].copy()
        v[:, 0, :] = c * a - 1j * s * b
        v[:, 1, :] = c * b - 1j * s * a


def agreement_masses(amp, n, ubits):
    idx = np.arange(amp.shape[0], dtype=np.uint64)
    agree = n - _popcount(idx ^ np.uint64(ubits)).astype(np.int64)
    return np.bincount(agree, weights=np.abs(amp) ** 2, minlength=n + 1).astype(np.float64)
