"""Multi-start Nelder-Mead maximisation of the enhancement factor over QAOA angles."""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import minimize

from .analytic.coeffs import DEFAULT_MAX_DEPTH, enhancement_factor
from .errors import CapacityError


@dataclass(frozen=True)
class OptimizationReport:
    p: int
    q: int
    best_value: float
    best_gammas: tuple[float, ...]
    best_betas: tuple[float, ...]
    starts: int
    tolerance: float
    per_start_values: tuple[float, ...]

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)


def objective(p: int, q: int, x: np.ndarray) -> float:
    """Enhancement factor at packed angles ``x = (gammas, betas)``; failures score -inf."""
    try:
        value = enhancement_factor(p, q, x[:p], x[p:])
    except (FloatingPointError, ValueError, OverflowError):
        return -math.inf
    return value if math.isfinite(value) else -math.inf


def initial_points(
    p: int,
    q: int,
    starts: int,
    rng: np.random.Generator,
    gamma_max: float | None = None,
    *,
    signed: bool = True,
) -> np.ndarray:
    """Uniform draws with ``|gamma_r|`` in ``(0, gamma_max]`` and ``beta_r`` in ``(0, pi)``.

    The objective is unchanged when every ``gamma_r`` flips sign together, but
    relative signs matter for ``p >= 2``.  With ``signed`` the first angle stays
    positive and the others get independent random signs, so every sign pattern
    is reachable from the start box.
    """
    gamma_max = 1.5 / math.sqrt(q) if gamma_max is None else gamma_max
    # one row of uniforms per start, so a longer run extends a shorter one
    draws = rng.random((starts, 3 * p - 1))
    gam = gamma_max * (1 - draws[:, :p])
    bet = math.pi * (1 - draws[:, p : 2 * p])
    if signed:
        gam[:, 1:] *= np.where(draws[:, 2 * p :] < 0.5, -1.0, 1.0)
    return np.hstack([gam, bet])


def _polish(p: int, q: int, x0: np.ndarray, tol: float) -> tuple[float, np.ndarray]:
    def loss(x):
        v = objective(p, q, x)
        return -v if math.isfinite(v) else math.inf

    res = minimize(
        loss,
        x0,
        method="Nelder-Mead",
        options={"xatol": tol, "fatol": tol, "maxiter": 4000 * len(x0), "maxfev": 8000 * len(x0), "adaptive": True},
    )
    x = np.asarray(res.x)
    return objective(p, q, x), x


def optimize_enhancement(
    p: int,
    q: int,
    starts: int,
    rng: np.random.Generator,
    tol: float = 1e-9,
    *,
    threads: int = 1,
    gamma_max: float | None = None,
    signed: bool = True,
) -> OptimizationReport:
    if p > DEFAULT_MAX_DEPTH:
        raise CapacityError(f"depth p={p} exceeds the engine cap of {DEFAULT_MAX_DEPTH}")
    if starts < 1:
        raise ValueError("need at least one start")
    points = initial_points(p, q, starts, rng, gamma_max, signed=signed)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(lambda x0: _polish(p, q, x0, tol), points))
    else:
        results = [_polish(p, q, x0, tol) for x0 in points]
    values = np.array([v for v, _ in results])
    best = int(np.argmax(values))  # first maximum wins ties
    x = results[best][1]
    return OptimizationReport(
        p=p,
        q=q,
        best_value=float(values[best]),
        best_gammas=tuple(float(v) for v in x[:p]),
        best_betas=tuple(float(v) for v in x[p:]),
        starts=starts,
        tolerance=tol,
        per_start_values=tuple(float(v) for v in values),
    )
