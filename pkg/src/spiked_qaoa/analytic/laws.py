"""Limiting overlap laws as functions of one standard Gaussian ``G``.

Every law exposes ``transform(g)`` mapping Gaussian draws to overlaps, so moments
come from Gauss-Hermite quadrature and samples from transformed normal draws.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Protocol

import numpy as np
from scipy.integrate import quad
from scipy.special import erf, roots_hermitenorm

from .scaling import epsilon_p

START_NODES = 201
MAX_NODES = 3201
AGREE_TOL = 1e-9
ADAPTIVE_WINDOW = 12.0  # Gaussian mass beyond this is below 1e-32


class QuadratureWarning(RuntimeWarning):
    pass


class GaussianLaw(Protocol):
    def transform(self, g: np.ndarray) -> np.ndarray: ...


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    nodes: int  # size of the last Gauss-Hermite rule tried
    converged: bool
    oscillation_flag: bool  # the Hermite nodes under-resolved the integrand's oscillation
    method: str = "gauss-hermite"


@lru_cache(maxsize=16)
def _rule(nodes: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = roots_hermitenorm(nodes)
    return x, w / math.sqrt(2 * math.pi)


def _under_resolved(x: np.ndarray, w: np.ndarray, rate: Callable, tol: float = AGREE_TOL) -> bool:
    """True when, at some node that can move the result by ``tol``, the period is below the node spacing.

    Integrands here are bounded by one, so nodes with weight far below ``tol``
    cannot matter however badly they resolve the oscillation.
    """
    spacing = np.gradient(x)
    important = w > 1e-3 * tol
    return bool(np.any(rate(x[important]) * spacing[important] > 2 * math.pi))


def gaussian_expectation(
    fn: Callable[[np.ndarray], np.ndarray],
    *,
    start: int = START_NODES,
    cap: int = MAX_NODES,
    tol: float = AGREE_TOL,
    phase_rate: Callable[[np.ndarray], np.ndarray] | None = None,
) -> QuadratureResult:
    """``E fn(G)`` with node doubling until two successive rules agree to ``tol``.

    Doubling also continues while ``phase_rate`` says the current rule is too
    coarse, since two equally under-resolved rules can agree by accident.
    """

    def coarse(x, w):
        return phase_rate is not None and _under_resolved(x, w, phase_rate, tol)

    nodes = start
    x, w = _rule(nodes)
    prev = float(w @ fn(x))
    agreed = False
    while nodes < cap:
        nodes = min(2 * nodes - 1, cap)
        x, w = _rule(nodes)
        value = float(w @ fn(x))
        agreed = abs(value - prev) <= tol
        prev = value
        if agreed and not coarse(x, w):
            break
    flagged = coarse(x, w)
    if agreed and not flagged:
        return QuadratureResult(prev, nodes, True, False)
    # Kinks and narrow spikes at G = 0 defeat the Hermite rule; fall back to
    # adaptive Gauss-Kronrod and certify with its error estimate instead.
    value, ok = _adaptive(fn, tol)
    if ok:
        return QuadratureResult(value, nodes, True, flagged, "adaptive")
    return QuadratureResult(prev, nodes, False, flagged)


def _adaptive(fn: Callable[[np.ndarray], np.ndarray], tol: float) -> tuple[float, bool]:
    norm = 1 / math.sqrt(2 * math.pi)

    def integrand(g: float) -> float:
        return float(fn(np.array([g]))[0]) * math.exp(-0.5 * g * g) * norm

    out = quad(
        integrand, -ADAPTIVE_WINDOW, ADAPTIVE_WINDOW, points=[0.0], limit=2000, epsabs=0.1 * tol, epsrel=0,
        full_output=True,
    )  # fmt: skip
    value, err = out[0], out[1]
    return float(value), len(out) == 3 and err <= tol


@dataclass(frozen=True)
class SineGaussianLaw:
    """``R = a sin(b Lambda^{1/eps} G^gpow)``."""

    a: float
    b: float
    gpow: int
    eps: float
    Lambda: float

    def __post_init__(self):
        if abs(self.a) > 1 + 1e-12:
            raise ValueError("|a| must not exceed 1")
        if self.gpow < 1 or not 0 < self.eps <= 1:
            raise ValueError("need gpow >= 1 and eps in (0, 1]")

    @property
    def frequency(self) -> float:
        return self.b * self.Lambda ** (1 / self.eps)

    def transform(self, g):
        return self.a * np.sin(self.frequency * np.asarray(g) ** self.gpow)

    def phase_rate(self, g):
        g = np.asarray(g)
        return np.abs(self.frequency * self.gpow * g ** (self.gpow - 1))


@dataclass(frozen=True)
class ArctanGaussianLaw:
    """``R = sin(arctan(x)) = x / sqrt(1 + x^2)`` with ``x = Lambda^{1/eps} G^gpow``."""

    gpow: int
    eps: float
    Lambda: float

    def transform(self, g):
        x = self.Lambda ** (1 / self.eps) * np.asarray(g, dtype=np.float64) ** self.gpow
        return x / np.sqrt(1 + x * x)


@dataclass(frozen=True)
class RoundedGaussianLaw:
    """``R = Phi(Lambda G^{q-1})`` with ``Phi(t) = 2 P(Z <= t) - 1 = erf(t / sqrt 2)``."""

    q: int
    Lambda: float

    def transform(self, g):
        return erf(self.Lambda * np.asarray(g, dtype=np.float64) ** (self.q - 1) / math.sqrt(2))


def sine_gaussian_law_p1(q: int, gamma: float, beta: float, Lambda: float) -> SineGaussianLaw:
    return SineGaussianLaw(
        a=math.exp(-2 * q * gamma**2) * math.sin(2 * beta), b=2 * q * gamma, gpow=q - 1, eps=1.0, Lambda=Lambda
    )


def sine_gaussian_law(p: int, q: int, a: float, b: float, Lambda: float) -> SineGaussianLaw:
    return SineGaussianLaw(a=a, b=b, gpow=(q - 1) ** p, eps=epsilon_p(p, q), Lambda=Lambda)


def pi_asymptotic_law(p: int, q: int, Lambda: float) -> ArctanGaussianLaw:
    """Limit law of ``p`` steps of tensor power iteration at the matching SNR scale."""
    return ArctanGaussianLaw(gpow=(q - 1) ** p, eps=epsilon_p(p, q), Lambda=Lambda)


def rounded_pi_law(q: int, Lambda: float) -> RoundedGaussianLaw:
    return RoundedGaussianLaw(q=q, Lambda=Lambda)


def law_moment_result(law: GaussianLaw, k: int) -> QuadratureResult:
    if k < 1:
        raise ValueError("k must be a positive integer")
    if isinstance(law, SineGaussianLaw) and law.a == 0:
        return QuadratureResult(0.0, 0, True, False)
    rate = getattr(law, "phase_rate", None)
    scaled_rate = None if rate is None else (lambda g: k * rate(g))
    return gaussian_expectation(lambda g: law.transform(g) ** k, phase_rate=scaled_rate)


def law_moment(law: GaussianLaw, k: int) -> float:
    """``E[R^k]`` under the law; warns when the quadrature could not be certified."""
    res = law_moment_result(law, k)
    if not res.converged:
        warnings.warn(
            f"quadrature for {type(law).__name__} moment {k} not certified "
            f"(nodes={res.nodes}, oscillation={res.oscillation_flag})",
            QuadratureWarning,
            stacklevel=2,
        )
    return res.value


def sample_law(law: GaussianLaw, size: int, rng: np.random.Generator) -> np.ndarray:
    return law.transform(rng.standard_normal(size))


def qaoa_biased_limit(q: int, gamma: float, beta: float, delta: float, Lambda: float) -> float:
    """Deterministic limit of the overlap for one layer from the biased initial state."""
    if not 0 <= delta <= math.pi / 4:
        raise ValueError("delta must lie in [0, pi/4]")
    return (
        math.exp(-2 * q * gamma**2)
        * math.sin(2 * beta)
        * math.sin(2 * q * Lambda * gamma * math.sin(2 * delta) ** (q - 1))
    )


def pi_biased_limit(q: int, delta: float, Lambda: float) -> float:
    if not 0 <= delta <= math.pi / 4:
        raise ValueError("delta must lie in [0, pi/4]")
    return math.sin(math.atan(Lambda * math.sin(2 * delta) ** (q - 1)))


def law_histogram(law: GaussianLaw, edges, *, points: int = 400_001, span: float = 10.0) -> np.ndarray:
    """Probability of each bin ``[edges[i], edges[i+1])`` under the law.

    The Gaussian variable is discretised on a fine midpoint grid over
    ``[-span, span]``; bin masses are then exact sums of grid weights, which
    stays accurate even when the transform oscillates quickly in ``G``.
    """
    edges = np.asarray(edges, dtype=np.float64)
    h = 2 * span / points
    g = -span + h * (np.arange(points) + 0.5)
    w = np.exp(-0.5 * g * g) * h / math.sqrt(2 * math.pi)
    r = law.transform(g)
    which = np.searchsorted(edges, r, side="right") - 1
    inside = (which >= 0) & (which < edges.size - 1)
    return np.bincount(which[inside], weights=w[inside], minlength=edges.size - 1)
