"""Depth-dependent SNR exponents."""

from __future__ import annotations


def epsilon_p(p: int, q: int) -> float:
    """Exponent in the weak-recovery threshold ``lambda_n ~ n^{(q-2+eps_p)/2}``."""
    if p < 1 or q < 2:
        raise ValueError("need p >= 1 and q >= 2")
    if q == 2:
        return 1.0 / p
    return (q - 2) / ((q - 1) ** p - 1)


def rho_ell(p: int, q: int, ell: int) -> float:
    if not 0 <= ell <= p:
        raise ValueError("need 0 <= ell <= p")
    if q == 2:
        return 0.5 + ell / (2 * p)
    return 0.5 * ((q - 1) ** p + (q - 1) ** ell - 2) / ((q - 1) ** p - 1)


def scaled_snr(Lambda: float, n: int, p: int, q: int) -> float:
    """``lambda_n = Lambda * n^{(q-2+eps_p)/2}``."""
    return Lambda * n ** ((q - 2 + epsilon_p(p, q)) / 2)
