"""Exact finite-n expectations over the noise for one-step QAOA.

All quantities are averages over ``W`` at fixed planted signal (by gauge
symmetry the signal can be taken to be all ones).  The moment-generating
function ``E <exp(zeta R)>`` is evaluated as a series in ``t``; each term needs a
binomial sum over the split ``tau_+ + tau_- = n - t`` and a length-``(2t+1)``
discrete Fourier transform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln


def p1_q2_expected_sq_overlap(n: int, gamma: float, beta: float, lam: float) -> float:
    """Closed-form ``E_W <R^2>`` for ``q = 2``, one QAOA layer."""
    if n < 2:
        raise ValueError("need n >= 2")
    first = (
        (n - 1) / (2 * n)
        * math.exp(-8 * gamma**2 * (n - 2) / n)
        * math.sin(2 * beta) ** 2
        * (1 - math.cos(8 * lam * gamma / n) ** (n - 2))
    )
    second = (
        (n - 1) / n
        * math.exp(-4 * gamma**2 * (n - 1) / n)
        * math.sin(4 * beta)
        * math.sin(4 * lam * gamma / n)
        * math.cos(4 * lam * gamma / n) ** (n - 2)
    )
    return first + second + 1 / n


def _split_weights(m: int, log_t: complex = 0.0, log_u: complex = 0.0, bias: float = 0.0):
    """Weights ``C(m,a) 2^-m T^a U^b`` (times bias factors) over ``a + b = m``."""
    a = np.arange(m + 1, dtype=np.float64)
    b = m - a
    logw = gammaln(m + 1) - gammaln(a + 1) - gammaln(b + 1) - m * math.log(2) + a * log_t + b * log_u
    if bias:
        logw = logw + a * math.log1p(bias) + b * math.log1p(-bias)
    return a - b, np.exp(logw)


def _z_values(n, q, t, lam, gamma, diff, weights):
    """``Z_{n,t}(k)`` for ``k = -t..t`` given the split differences and weights."""
    k = np.arange(-t, t + 1, dtype=np.float64)[:, None]
    scale = lam * gamma / n ** (q - 1)
    phase = np.exp(1j * scale * ((diff + k) ** q - (diff - k) ** q))
    return phase @ weights


def _dft(t: int, z: np.ndarray) -> np.ndarray:
    """``Zhat(xi) = sum_k exp(-2 pi i xi k/(2t+1)) Z(k)``, computed directly."""
    idx = np.arange(-t, t + 1)
    return np.exp(-2j * np.pi * np.outer(idx, idx) / (2 * t + 1)) @ z


def _e_value(t: int, zhat: np.ndarray) -> complex:
    """``E = (2t+1)^{-1} sum_xi sin^t(2 pi xi/(2t+1)) Zhat(xi)``."""
    size = 2 * t + 1
    xi = np.arange(-t, t + 1)
    return complex(np.sum(np.sin(2 * np.pi * xi / size) ** t * zhat) / size)


def _log_prefactor(n: int, q: int, t: int, gamma: float) -> float:
    """Log of ``C(n,t) exp(-gamma^2 [n^q - (n-2t)^q] / n^{q-1})``."""
    return (
        gammaln(n + 1) - gammaln(t + 1) - gammaln(n - t + 1)
        - gamma**2 * (float(n) ** q - float(n - 2 * t) ** q) / float(n) ** (q - 1)
    )


def truncation_bound(t: int, zeta: complex) -> float:
    """Upper bound ``(6|zeta|)^t (2t+1) e^{|zeta|} / t!`` on the magnitude of term ``t``."""
    z = abs(zeta)
    if t == 0:
        return math.exp(z)
    return math.exp(t * math.log(6 * z) - gammaln(t + 1) + z) * (2 * t + 1) if z > 0 else 0.0


@dataclass(frozen=True)
class MgfSeriesTerm:
    t: int
    E: complex
    I: complex
    bound: float
    z: np.ndarray = field(repr=False)
    zhat: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class MgfResult:
    value: complex
    terms: list[MgfSeriesTerm]
    tol_met: bool
    tail_bound: float  # sum of the bounds of the omitted terms up to t = n


def p1_expected_mgf_series(
    n: int, q: int, gamma: float, beta: float, lam: float, zeta: complex, tol: float = 1e-15
) -> MgfResult:
    """Series for ``E_W <exp(zeta R)>`` with every retained term recorded."""
    if abs(zeta) > n:
        raise ValueError("the series bound needs |zeta| <= n")
    zeta = complex(zeta)
    x = np.sinh(zeta / n) * math.sin(2 * beta)
    c2, s2 = math.cos(beta) ** 2, math.sin(beta) ** 2
    big_t = np.exp(zeta / n) * c2 + np.exp(-zeta / n) * s2
    big_u = np.exp(-zeta / n) * c2 + np.exp(zeta / n) * s2
    log_t, log_u = np.log(big_t), np.log(big_u)

    # t = 0 has no phase, so the binomial sum collapses to ((T+U)/2)^n = cosh(zeta/n)^n
    e0 = complex(np.cosh(zeta / n) ** n)
    terms = [MgfSeriesTerm(0, e0, e0, truncation_bound(0, zeta), np.array([e0]), np.array([e0]))]
    total = e0
    tol_met = False
    t_stop = n + 1
    for t in range(1, n + 1):
        bound = truncation_bound(t, zeta)
        if bound <= tol * abs(total):
            tol_met = True
            t_stop = t
            break
        if x == 0:
            terms.append(MgfSeriesTerm(t, 0j, 0j, bound, np.zeros(2 * t + 1), np.zeros(2 * t + 1)))
            continue
        diff, w = _split_weights(n - t, log_t, log_u)
        z = _z_values(n, q, t, lam, gamma, diff, w)
        zhat = _dft(t, z)
        e = _e_value(t, zhat)
        term = np.exp(_log_prefactor(n, q, t, gamma) + t * np.log(complex(x))) * e
        terms.append(MgfSeriesTerm(t, e, complex(term), bound, z, zhat))
        total += term
    tail = sum(truncation_bound(t, zeta) for t in range(t_stop, n + 1))
    return MgfResult(complex(total), terms, tol_met, tail)


def p1_expected_mgf(
    n: int, q: int, gamma: float, beta: float, lam: float, zeta: complex, tol: float = 1e-15
) -> complex:
    return p1_expected_mgf_series(n, q, gamma, beta, lam, zeta, tol).value


def mgf_second_moment(
    n: int, q: int, gamma: float, beta: float, lam: float, *, h: float = 0.1, levels: int = 4
) -> float:
    """``E <R^2>`` as the second derivative of the MGF at zero.

    Central differences at steps ``h, h/2, ...`` combined by Richardson
    extrapolation in ``h^2``.
    """
    f0 = p1_expected_mgf(n, q, gamma, beta, lam, 0.0).real
    table = []
    for i in range(levels):
        step = h / 2**i
        fp = p1_expected_mgf(n, q, gamma, beta, lam, step).real
        fm = p1_expected_mgf(n, q, gamma, beta, lam, -step).real
        table.append((fp - 2 * f0 + fm) / step**2)
    for j in range(1, levels):
        factor = 4.0**j
        table = [(factor * table[i + 1] - table[i]) / (factor - 1) for i in range(len(table) - 1)]
    return float(table[0])


def second_moment_terms(n: int, q: int, gamma: float, beta: float, lam: float) -> tuple[float, complex, complex]:
    """The three pieces ``T0, T1, T2`` of ``E <R^2>``; only ``t <= 2`` contribute."""
    if n < 3:
        raise ValueError("need n >= 3")
    s2b, c2b = math.sin(2 * beta), math.cos(2 * beta)

    diff, w = _split_weights(n)
    bracket = (diff**2 - n) * math.cos(4 * beta) + diff**2 + n
    t0 = float(w @ bracket) / (2 * n**2)

    diff, w = _split_weights(n - 1)
    z1 = _z_values(n, q, 1, lam, gamma, diff, w * diff * (c2b / n))
    t1 = math.exp(_log_prefactor(n, q, 1, gamma)) * (2 * s2b / n) * _e_value(1, _dft(1, z1))

    diff, w = _split_weights(n - 2)
    z2 = _z_values(n, q, 2, lam, gamma, diff, w)
    t2 = math.exp(_log_prefactor(n, q, 2, gamma)) * 2 * (s2b / n) ** 2 * _e_value(2, _dft(2, z2))
    return t0, t1, t2


def p1_expected_sq_overlap_general_q(n: int, q: int, gamma: float, beta: float, lam: float) -> float:
    t0, t1, t2 = second_moment_terms(n, q, gamma, beta, lam)
    return float((t0 + t1 + t2).real)


def p1_biased_expected_overlap(
    n: int, q: int, gamma: float, beta: float, lam: float, k: int, delta: float
) -> float:
    """``E_theta E_W <R>`` for one layer started from the biased product state.

    Biased qubits are drawn independently with probability ``k/n``; only the
    ``t = 0, 1`` terms of the biased MGF contribute to its first derivative.
    """
    kappa = k * math.sin(2 * delta) / n
    t0 = kappa * math.cos(2 * beta)
    damp = 1 - k / n + k * math.cos(2 * delta) / n
    diff, w = _split_weights(n - 1, bias=kappa)
    z1 = _z_values(n, q, 1, lam, gamma, diff, w)
    t1 = math.exp(_log_prefactor(n, q, 1, gamma)) * (math.sin(2 * beta) / n) * damp * _e_value(1, _dft(1, z1))
    return float((t0 + t1).real)
