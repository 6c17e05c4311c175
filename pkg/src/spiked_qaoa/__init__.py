"""QAOA and tensor power iteration on the spiked tensor model."""

from .kernels import BACKEND
from .model import (
    SpikedTensorInstance,
    cost,
    cost_diagonal,
    generate_instance,
    overlap,
)
from .statevector import (
    BiasSpec,
    OverlapDistribution,
    QaoaSchedule,
    StateVector,
    overlap_distribution,
    overlap_moment,
    prepare_biased,
    prepare_uniform,
    run_qaoa,
)

__all__ = [
    "BACKEND",
    "BiasSpec",
    "OverlapDistribution",
    "QaoaSchedule",
    "SpikedTensorInstance",
    "StateVector",
    "cost",
    "cost_diagonal",
    "generate_instance",
    "overlap",
    "overlap_distribution",
    "overlap_moment",
    "prepare_biased",
    "prepare_uniform",
    "run_qaoa",
]
