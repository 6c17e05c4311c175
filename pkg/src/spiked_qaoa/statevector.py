"""Exact state-vector simulation of QAOA on spiked tensor instances."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import CapacityError
from .model import DEFAULT_MAX_QUBITS, SpikedTensorInstance, cost_diagonal, signal_bits

NORM_TOL = 1e-10


@dataclass
class StateVector:
    n: int
    amp: np.ndarray

    def __post_init__(self):
        self.amp = np.ascontiguousarray(self.amp, dtype=np.complex128)
        if self.amp.shape != (1 << self.n,):
            raise ValueError(f"expected {1 << self.n} amplitudes, got {self.amp.shape}")

    def copy(self) -> StateVector:
        return StateVector(self.n, self.amp.copy())

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amp) ** 2)))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amp) ** 2


@dataclass(frozen=True)
class QaoaSchedule:
    gamma: tuple[float, ...]
    beta: tuple[float, ...]

    def __post_init__(self):
        g = tuple(float(x) for x in np.atleast_1d(self.gamma))
        b = tuple(float(x) for x in np.atleast_1d(self.beta))
        if len(g) != len(b):
            raise ValueError("gamma and beta must have the same length")
        object.__setattr__(self, "gamma", g)
        object.__setattr__(self, "beta", b)

    @property
    def p(self) -> int:
        return len(self.gamma)


@dataclass(frozen=True)
class BiasSpec:
    """Per-qubit initial angles; biased qubits carry ``pi/4 - delta``."""

    k: int
    delta: float
    theta: np.ndarray

    def __post_init__(self):
        if not 0 <= self.delta <= np.pi / 4:
            raise ValueError("delta must lie in [0, pi/4]")
        theta = np.asarray(self.theta, dtype=np.float64)
        ok = np.isclose(theta, np.pi / 4, rtol=0, atol=1e-15) | np.isclose(
            theta, np.pi / 4 - self.delta, rtol=0, atol=1e-15
        )
        if not np.all(ok):
            raise ValueError("every theta must be pi/4 or pi/4 - delta")
        object.__setattr__(self, "theta", theta)

    @property
    def biased(self) -> np.ndarray:
        return self.theta != np.pi / 4


def sample_bias(n: int, k: int, delta: float, rng: np.random.Generator) -> BiasSpec:
    """Each qubit is biased independently with probability ``k/n``."""
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    hit = rng.random(n) < k / n
    theta = np.where(hit, np.pi / 4 - delta, np.pi / 4)
    return BiasSpec(k=k, delta=delta, theta=theta)


@dataclass(frozen=True)
class OverlapDistribution:
    """``mass[m]`` is the probability that the measured string agrees with ``u`` on ``m`` bits."""

    n: int
    mass: np.ndarray

    @property
    def values(self) -> np.ndarray:
        return (2 * np.arange(self.n + 1) - self.n) / self.n


def _check_cap(n: int, max_n: int) -> None:
    if n > max_n:
        raise CapacityError(f"n={n} exceeds the simulator cap of {max_n} qubits")


def prepare_uniform(n: int, *, max_n: int = DEFAULT_MAX_QUBITS) -> StateVector:
    _check_cap(n, max_n)
    return StateVector(n, np.full(1 << n, 2.0 ** (-n / 2), dtype=np.complex128))


def prepare_biased(u, bias: BiasSpec, *, max_n: int = DEFAULT_MAX_QUBITS) -> StateVector:
    """Product state with qubit ``j`` in ``cos(theta_j)|u_j> + sin(theta_j)|-u_j>``."""
    u = np.asarray(u)
    n = u.size
    _check_cap(n, max_n)
    if bias.theta.shape != (n,):
        raise ValueError("bias angles and u must have the same length")
    amp = np.ones(1, dtype=np.complex128)
    # kron puts each new factor on the most significant bit, and qubit j is bit j
    for j in range(n):
        c, s = np.cos(bias.theta[j]), np.sin(bias.theta[j])
        plus, minus = (c, s) if u[j] == 1 else (s, c)
        amp = np.kron([plus, minus], amp)
    return StateVector(n, amp)


def apply_cost_phase(state: StateVector, diag: np.ndarray, gamma: float) -> StateVector:
    diag = np.asarray(diag, dtype=np.float64)
    if diag.shape != state.amp.shape:
        raise ValueError("diagonal length does not match the state")
    kernels.apply_phase(state.amp, np.ascontiguousarray(diag), float(gamma))
    return state


def apply_mixer(state: StateVector, beta: float) -> StateVector:
    """``exp(-i beta sum_j X_j)`` as one 2x2 rotation per qubit."""
    kernels.apply_mixer(state.amp, state.n, float(beta))
    return state


def run_qaoa(
    instance: SpikedTensorInstance,
    schedule: QaoaSchedule,
    init: StateVector,
    *,
    diag: np.ndarray | None = None,
    max_n: int = DEFAULT_MAX_QUBITS,
) -> StateVector:
    if init.n != instance.n:
        raise ValueError("initial state and instance sizes differ")
    _check_cap(instance.n, max_n)
    state = init.copy()
    if schedule.p == 0:
        return state
    if diag is None:
        diag = cost_diagonal(instance, max_n=max_n)
    for g, b in zip(schedule.gamma, schedule.beta):
        apply_cost_phase(state, diag, g)
        apply_mixer(state, b)
    return state


def overlap_distribution(state: StateVector, u) -> OverlapDistribution:
    u = np.asarray(u)
    if u.size != state.n:
        raise ValueError("u length does not match the state")
    mass = kernels.agreement_masses(state.amp, state.n, signal_bits(u))
    return OverlapDistribution(state.n, np.asarray(mass))


def overlap_moment(dist: OverlapDistribution, k: int) -> float:
    return float(np.dot(dist.mass, dist.values**k))


def sample_bitstrings(state: StateVector, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` measurement outcomes as rows of +-1, drawn from ``|amp|^2``."""
    p = state.probabilities()
    cdf = np.cumsum(p)
    idx = np.searchsorted(cdf, rng.random(count) * cdf[-1], side="right")
    idx = np.minimum(idx, p.size - 1)
    return (1 - 2 * ((idx[:, None] >> np.arange(state.n)) & 1)).astype(np.int8)
