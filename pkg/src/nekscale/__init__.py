"""
nekscale - Nekrasov scaling certificates and inverse-norm bounds

Certifies SDD and Nekrasov structure of dense real matrices, builds the
diagonal scalings that make a Nekrasov matrix SDD, and turns them into
upper bounds on ||A^{-1}|| and on LCP error coefficients, checked against
exact elimination and power-iteration oracles.
"""

from nekscale._version import __environment__, __version__, __version_info__

from nekscale.core.bounds import (
    BoundMethod,
    BoundReport,
    evaluate_bound,
    one_norm_bound,
    optimize_t,
    scaled_bound,
    scaled_z_bound,
    sigma_min_bound,
    unit_scaled_bound,
    varah_bound,
    z_bound,
)
from nekscale.core.config import ConfigLoader, Settings
from nekscale.core.lcp import (
    LcpBoundReport,
    LcpInstance,
    lcp_coefficient,
    lcp_error_radius,
    lcp_reference_coefficient,
    lcp_residual,
)
from nekscale.core.matrix import NekrasovProfile, SquareMatrix, comparison_matrix, profile
from nekscale.core.oracles import exact_inverse_inf_norm, exact_inverse_one_norm, sigma_min_oracle
from nekscale.core.scaling import (
    EpsilonPlan,
    ScalingMatrix,
    Strategy,
    apply_scaling,
    build_scaling,
    full_epsilon_plan,
    pivot_epsilon_plan,
    validate_plan,
)

from nekscale.io.reader import MatrixReader, load_matrix
from nekscale.io.writer import MatrixWriter, write_matrix

from nekscale.repro.fixtures import FixtureSet
from nekscale.repro.harness import ReproRunner

from nekscale.utils.logging import get_logger

__all__ = [
    # Version
    "__version__",
    "__version_info__",
    "__environment__",
    # Core
    "SquareMatrix",
    "NekrasovProfile",
    "comparison_matrix",
    "profile",
    "exact_inverse_inf_norm",
    "exact_inverse_one_norm",
    "sigma_min_oracle",
    "EpsilonPlan",
    "ScalingMatrix",
    "Strategy",
    "pivot_epsilon_plan",
    "full_epsilon_plan",
    "validate_plan",
    "build_scaling",
    "apply_scaling",
    "BoundMethod",
    "BoundReport",
    "varah_bound",
    "scaled_bound",
    "unit_scaled_bound",
    "z_bound",
    "scaled_z_bound",
    "one_norm_bound",
    "sigma_min_bound",
    "evaluate_bound",
    "optimize_t",
    "LcpInstance",
    "LcpBoundReport",
    "lcp_coefficient",
    "lcp_reference_coefficient",
    "lcp_residual",
    "lcp_error_radius",
    "ConfigLoader",
    "Settings",
    # I/O
    "MatrixReader",
    "MatrixWriter",
    "load_matrix",
    "write_matrix",
    # Reproduction
    "FixtureSet",
    "ReproRunner",
    # Utils
    "get_logger",
]
