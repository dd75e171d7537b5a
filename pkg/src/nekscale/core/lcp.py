"""
Error bounds for linear complementarity problems with Nekrasov matrices.

LCP(A, q) asks for x >= 0 with Ax + q >= 0 and x^T (Ax + q) = 0. For any
candidate x, ||x - x*||_inf <= c(A) * ||r(x)||_inf with the natural residual
r(x) = min(x, Ax + q) and c(A) bounding max over d in [0,1]^n of
||(I - D + DA)^{-1}||_inf. This module computes c(A) from a pivot-strategy
plan or from any positive diagonal scaling S with AS SDD, the classical
reference coefficient, and a brute-force solver used as an oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional, Sequence, Union

import numpy as np

from nekscale.core.bounds import NotSDDError, scaled_margins
from nekscale.core.matrix import (
    DimensionMismatchError,
    MatrixError,
    SingularMatrixError,
    SquareMatrix,
    comparison_matrix,
    residual_min,
    varah_margins,
)
from nekscale.core.oracles import DEFAULT_PIVOT_TOLERANCE, inverse, solve
from nekscale.core.scaling import (
    DEFAULT_T,
    EpsilonPlan,
    InvalidPlanError,
    Placement,
    PlanViolation,
    ScalingMatrix,
    Strategy,
    apply_scaling,
    build_scaling,
    pivot_epsilon_plan,
    require_nekrasov,
)
from nekscale.utils.logging import get_logger


logger = get_logger(__name__)

DEFAULT_MAX_ENUMERATION_SIZE = 12
RECONCILE_TOLERANCE = 1e-10


class LcpError(MatrixError):
    """Raised when an LCP computation cannot be completed."""
    pass


class NonpositiveDiagonalError(MatrixError):
    """Raised when the LCP bounds meet a diagonal entry <= 0."""

    def __init__(self, row: int):
        super().__init__(f"Diagonal entry a[{row},{row}] is not positive")
        self.row = row


class MissingCandidateError(MatrixError):
    """Raised when a residual is requested without a candidate point."""
    pass


class LcpBranch(str, Enum):
    """Which term of the coefficient attains the maximum."""
    MARGIN = "margin"  # 1 / min_i(eps_i - w_i + p_i)
    SCALING = "scaling"  # 1 / min_i s_i


@dataclass(frozen=True)
class LcpInstance:
    """
    An LCP(A, q) with an optional candidate point x.

    Raises:
        DimensionMismatchError: If q or x does not match A
    """

    matrix: SquareMatrix
    q: np.ndarray
    x: Optional[np.ndarray] = None

    def __post_init__(self):
        q = np.array(self.q, dtype=float).reshape(-1)
        if q.shape[0] != self.matrix.n:
            raise DimensionMismatchError(f"q has {q.shape[0]} entries, matrix has n={self.matrix.n}")
        q.setflags(write=False)
        object.__setattr__(self, "q", q)

        if self.x is not None:
            x = np.array(self.x, dtype=float).reshape(-1)
            if x.shape[0] != self.matrix.n:
                raise DimensionMismatchError(
                    f"x has {x.shape[0]} entries, matrix has n={self.matrix.n}"
                )
            x.setflags(write=False)
            object.__setattr__(self, "x", x)


@dataclass(frozen=True)
class LcpBoundReport:
    """
    LCP error coefficient with its ingredients.

    Attributes:
        coefficient: max(1 / min margins, 1 / min s)
        branch: Term attaining the maximum (MARGIN on ties)
        beta_bar: Row margins of AS, a_ii s_i - sum_{j != i} |a_ij| s_j
        margins: eps_i - w_i + p_i from the plan
        scaling: Scaling matrix
        plan: Pivot-strategy plan
        error_radius: coefficient * ||r(x)||_inf when a candidate was given
    """

    coefficient: float
    branch: LcpBranch
    beta_bar: np.ndarray
    margins: np.ndarray
    scaling: ScalingMatrix
    plan: EpsilonPlan
    error_radius: Optional[float] = None
    residual: Optional[np.ndarray] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "coefficient": self.coefficient,
            "branch": self.branch.value,
            "beta_bar": self.beta_bar.tolist(),
            "margins": self.margins.tolist(),
            "scaling": self.scaling.to_dict(),
            "plan": self.plan.to_dict(),
            "error_radius": self.error_radius,
            "residual": self.residual.tolist() if self.residual is not None else None,
        }


def _require_positive_diagonal(A: SquareMatrix) -> None:
    diag = np.diag(A.entries)
    failing = np.flatnonzero(~(diag > 0))
    if failing.size:
        raise NonpositiveDiagonalError(int(failing[0]) + 1)


def lcp_coefficient(
    A: SquareMatrix,
    t: float = DEFAULT_T,
    plan: Optional[EpsilonPlan] = None,
    placement: Union[Placement, str] = Placement.DELTA,
) -> LcpBoundReport:
    """
    Coefficient c(A) = max(1 / min_i(eps_i - w_i + p_i), 1 / min_i s_i).

    Args:
        A: Nekrasov matrix with positive diagonal
        t: Initialization fraction when no plan is given
        plan: Explicit pivot-strategy plan overriding the generated one
        placement: Placement used when the plan is generated

    Returns:
        LcpBoundReport

    Raises:
        NonpositiveDiagonalError: If some a_ii <= 0
        NotNekrasovError: If A is not Nekrasov
        InvalidPlanError: If the plan is invalid or not a pivot-strategy plan
        LcpError: If the two margin computations disagree
    """
    _require_positive_diagonal(A)
    require_nekrasov(A)

    if plan is None:
        plan = pivot_epsilon_plan(A, t, placement)
    elif plan.strategy is not Strategy.PIVOT:
        raise InvalidPlanError(
            [PlanViolation(None, "strategy", "LCP bounds accept pivot-strategy plans only")]
        )

    S = build_scaling(A, plan)
    _, _, margins = scaled_margins(A, plan)

    scaled = np.abs(apply_scaling(A, S).entries)
    diag_scaled = np.diag(scaled).copy()
    beta_bar = diag_scaled - (scaled.sum(axis=1) - diag_scaled)

    row_scale = scaled.sum(axis=1)
    if not np.all(np.abs(beta_bar - margins) <= RECONCILE_TOLERANCE * np.maximum(row_scale, 1.0)):
        raise LcpError(
            f"Scaled row margins disagree with plan margins: {beta_bar.tolist()} vs {margins.tolist()}"
        )

    margin_term = float(1.0 / margins.min())
    scaling_term = float(1.0 / S.s.min())
    branch = LcpBranch.MARGIN if margin_term >= scaling_term else LcpBranch.SCALING

    logger.debug(
        f"LCP coefficient: margin term {margin_term:.6g}, scaling term {scaling_term:.6g}"
    )
    return LcpBoundReport(
        coefficient=max(margin_term, scaling_term),
        branch=branch,
        beta_bar=beta_bar,
        margins=margins,
        scaling=S,
        plan=plan,
    )


def lcp_scaling_coefficient(
    A: SquareMatrix,
    S: Union[ScalingMatrix, Sequence[float], np.ndarray],
) -> float:
    """
    Coefficient max(max_i s_i / min_i beta_i, max_i s_i / min_i s_i) for any
    positive diagonal S with AS strictly diagonally dominant.

    beta_i = a_ii s_i - sum_{j != i} |a_ij| s_j are the row margins of AS.
    For a pivot-strategy scaling max_i s_i <= 1 and the result agrees with
    lcp_coefficient; full-strategy scalings (max_i s_i may exceed 1) and
    hand-built scalings are accepted too.

    Args:
        A: Matrix with positive diagonal
        S: Scaling matrix or its diagonal

    Returns:
        Coefficient c with ||x - x*||_inf <= c * ||r(x)||_inf

    Raises:
        NonpositiveDiagonalError: If some a_ii <= 0
        MatrixError: If an entry of S is not finite and positive
        DimensionMismatchError: If S does not match A
        NotSDDError: If AS is not strictly diagonally dominant
    """
    _require_positive_diagonal(A)
    if not isinstance(S, ScalingMatrix):
        S = ScalingMatrix(np.asarray(S, dtype=float))

    beta_bar = varah_margins(apply_scaling(A, S))
    failing = np.flatnonzero(~(beta_bar > 0))
    if failing.size:
        raise NotSDDError(int(failing[0]) + 1)

    s_max = S.norm
    return float(max(s_max / beta_bar.min(), s_max / S.s.min()))


def lcp_reference_coefficient(
    A: SquareMatrix,
    pivot_tolerance: float = DEFAULT_PIVOT_TOLERANCE,
) -> float:
    """
    Reference coefficient ||M(A)^{-1} max(Lambda, I)||_inf.

    Lambda = diag(a_ii); the H-matrix requirement is certified by building
    a pivot-strategy scaling.

    Raises:
        NonpositiveDiagonalError: If some a_ii <= 0
        NotNekrasovError: If A is not Nekrasov
        SingularMatrixError: If the comparison matrix is numerically singular
    """
    _require_positive_diagonal(A)
    build_scaling(A, pivot_epsilon_plan(A))

    comparison_inverse = inverse(comparison_matrix(A), pivot_tolerance)
    weights = np.maximum(np.diag(A.entries), 1.0)
    return float((np.abs(comparison_inverse) * weights[None, :]).sum(axis=1).max())


def lcp_residual(inst: LcpInstance) -> np.ndarray:
    """
    Natural residual r(x) = min(x, Ax + q).

    Raises:
        MissingCandidateError: If the instance has no candidate x
    """
    if inst.x is None:
        raise MissingCandidateError("LCP instance has no candidate point x")
    return residual_min(inst.x, inst.matrix.entries @ inst.x + inst.q)


def lcp_error_report(
    inst: LcpInstance,
    t: float = DEFAULT_T,
    plan: Optional[EpsilonPlan] = None,
    placement: Union[Placement, str] = Placement.DELTA,
) -> LcpBoundReport:
    """Coefficient report with the error radius of the instance's candidate."""
    residual = lcp_residual(inst)
    report = lcp_coefficient(inst.matrix, t, plan, placement)
    radius = report.coefficient * float(np.abs(residual).max())
    return LcpBoundReport(
        coefficient=report.coefficient,
        branch=report.branch,
        beta_bar=report.beta_bar,
        margins=report.margins,
        scaling=report.scaling,
        plan=report.plan,
        error_radius=radius,
        residual=residual,
    )


def lcp_error_radius(
    inst: LcpInstance,
    t: float = DEFAULT_T,
    plan: Optional[EpsilonPlan] = None,
    placement: Union[Placement, str] = Placement.DELTA,
) -> float:
    """Upper bound on ||x - x*||_inf for the instance's candidate x."""
    report = lcp_error_report(inst, t, plan, placement)
    return float(report.error_radius)  # type: ignore[arg-type]


def solve_lcp_enumeration(
    A: SquareMatrix,
    q: Sequence[float],
    max_size: int = DEFAULT_MAX_ENUMERATION_SIZE,
    pivot_tolerance: float = DEFAULT_PIVOT_TOLERANCE,
) -> np.ndarray:
    """
    Solve LCP(A, q) by trying all 2^n complementary bases.

    Basis b (as a bit mask) makes x_i basic for each set bit i; the
    lowest feasible mask wins.

    Args:
        A: Matrix, at most max_size rows
        q: Right-hand side
        max_size: Largest n accepted
        pivot_tolerance: Relative singularity threshold for the basis solves

    Returns:
        A solution x*

    Raises:
        DimensionMismatchError: If q does not match A
        LcpError: If n exceeds max_size or no basis is feasible
    """
    n = A.n
    q_arr = np.asarray(q, dtype=float).reshape(-1)
    if q_arr.shape[0] != n:
        raise DimensionMismatchError(f"q has {q_arr.shape[0]} entries, matrix has n={n}")
    if n > max_size:
        raise LcpError(f"Enumeration is limited to n <= {max_size}, got n={n}")

    entries = A.entries
    feasibility = 1e-9 * max(1.0, float(np.abs(q_arr).max()), float(np.abs(entries).max()))

    for mask in range(1 << n):
        basic = [i for i in range(n) if mask >> i & 1]
        x = np.zeros(n)
        if basic:
            block = SquareMatrix(entries[np.ix_(basic, basic)])
            try:
                x[basic] = solve(block, -q_arr[basic], pivot_tolerance)
            except SingularMatrixError:
                continue
        w = entries @ x + q_arr
        if np.all(x >= -feasibility) and np.all(w >= -feasibility):
            logger.debug(f"Feasible complementary basis {mask:0{n}b}")
            return np.maximum(x, 0.0)

    raise LcpError("No complementary basis yields a feasible solution")
