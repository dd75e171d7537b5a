"""Core components: matrices, oracles, scalings, bounds and LCP coefficients."""

from nekscale.core.bounds import (
    BOUND_METHODS,
    BoundMethod,
    BoundReport,
    evaluate_bound,
    optimize_t,
)
from nekscale.core.config import ConfigLoader, Settings
from nekscale.core.lcp import LcpBoundReport, LcpInstance, lcp_coefficient
from nekscale.core.matrix import MatrixError, NekrasovProfile, SquareMatrix, profile
from nekscale.core.scaling import EpsilonPlan, Placement, ScalingMatrix, Strategy

__all__ = [
    "BOUND_METHODS",
    "BoundMethod",
    "BoundReport",
    "evaluate_bound",
    "optimize_t",
    "ConfigLoader",
    "Settings",
    "LcpBoundReport",
    "LcpInstance",
    "lcp_coefficient",
    "MatrixError",
    "NekrasovProfile",
    "SquareMatrix",
    "profile",
    "EpsilonPlan",
    "Placement",
    "ScalingMatrix",
    "Strategy",
]
