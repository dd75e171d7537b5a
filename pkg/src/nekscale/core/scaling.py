"""
Epsilon plans and diagonal scalings that turn a Nekrasov matrix into an SDD one.

A plan fixes the vector eps; the scaling is s_i = (h_i(A) + eps_i) / |a_ii|.
Two strategies are supported:

- FULL: every eps_i is free (eps_1 > 0, 0 < eps_i <= delta_i).
- PIVOT: eps_i = 0 before the pivot row k, the first row with no nonzero
  entry right of the diagonal; 0 < eps_i < delta_i from k on.

In both cases eps_i must exceed w_i = sum_{j<i} |a_ij| eps_j / |a_jj| on
every row after the first free one. Plans for many values of t are built
at once by epsilon_grid, which the single-t constructors delegate to.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from nekscale.core.matrix import (
    DimensionMismatchError,
    MatrixError,
    NekrasovProfile,
    SquareMatrix,
    ZeroDiagonalError,
    profile,
)
from nekscale.utils.logging import get_logger


logger = get_logger(__name__)

DEFAULT_T = 0.5


class NotNekrasovError(MatrixError):
    """Raised when an operation requires a Nekrasov matrix."""

    def __init__(self, row: int, message: Optional[str] = None):
        super().__init__(message or f"Matrix is not Nekrasov: |a_ii| <= h_i(A) at row {row}")
        self.row = row


class ParameterRangeError(MatrixError):
    """Raised when t or another scalar parameter is out of range."""
    pass


class InvalidPlanError(MatrixError):
    """Raised when an epsilon plan violates one of its inequalities."""

    def __init__(self, violations: List["PlanViolation"]):
        summary = "; ".join(str(v) for v in violations[:5])
        super().__init__(f"Invalid epsilon plan: {summary}")
        self.violations = violations


class Strategy(str, Enum):
    """Which rows carry a free epsilon."""
    FULL = "full"
    PIVOT = "pivot"

    @classmethod
    def _missing_(cls, value: object) -> Optional["Strategy"]:
        if isinstance(value, str):
            return STRATEGY_ALIASES.get(value.lower())
        return None


# Published names: t21 frees every row, t22 frees only the pivot row
STRATEGY_ALIASES: Dict[str, Strategy] = {
    "t21": Strategy.FULL,
    "t22": Strategy.PIVOT,
}


class Placement(str, Enum):
    """Where a free epsilon starts inside its admissible interval."""
    DELTA = "delta"  # t * delta_i, then rescale earlier rows
    INTERVAL = "interval"  # w_i + t * (delta_i - w_i) when w_i < delta_i


@dataclass(frozen=True)
class PlanViolation:
    """One failed plan inequality; row is 1-based (None for whole-plan issues)."""
    row: Optional[int]
    rule: str
    detail: str

    def __str__(self) -> str:
        where = f"row {self.row}" if self.row is not None else "plan"
        return f"{where}: {self.rule} ({self.detail})"

    def to_dict(self) -> Dict[str, Any]:
        return {"row": self.row, "rule": self.rule, "detail": self.detail}


@dataclass(frozen=True)
class PlanCheck:
    """Result of validate_plan."""
    valid: bool
    violations: List[PlanViolation] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.valid


@dataclass(frozen=True)
class EpsilonPlan:
    """
    An epsilon vector together with the strategy that produced it.

    Attributes:
        strategy: FULL or PIVOT
        k: 1-based pivot row (1 under FULL)
        eps: epsilon vector, read-only
        t: initialization fraction, None for explicit plans
        placement: where free epsilons were started, None for explicit plans
    """

    strategy: Strategy
    k: int
    eps: np.ndarray
    t: Optional[float] = None
    placement: Optional[Placement] = None

    def __post_init__(self):
        eps = np.array(self.eps, dtype=float).reshape(-1)
        eps.setflags(write=False)
        object.__setattr__(self, "eps", eps)

    @property
    def n(self) -> int:
        return int(self.eps.shape[0])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "strategy": self.strategy.value,
            "k": self.k,
            "eps": self.eps.tolist(),
            "t": self.t,
            "placement": self.placement.value if self.placement else None,
        }


@dataclass(frozen=True)
class ScalingMatrix:
    """Positive diagonal scaling S = diag(s)."""

    s: np.ndarray

    def __post_init__(self):
        s = np.array(self.s, dtype=float).reshape(-1)
        if s.size == 0 or not np.all(np.isfinite(s)) or not np.all(s > 0):
            raise MatrixError("Scaling entries must be finite and positive")
        s.setflags(write=False)
        object.__setattr__(self, "s", s)

    @property
    def n(self) -> int:
        return int(self.s.shape[0])

    @property
    def norm(self) -> float:
        """||S||_inf = max_i s_i."""
        return float(self.s.max())

    def as_matrix(self) -> SquareMatrix:
        return SquareMatrix.diagonal(self.s)

    def to_dict(self) -> Dict[str, Any]:
        return {"s": self.s.tolist(), "norm": self.norm}


def _coerce_strategy(strategy: Union[Strategy, str]) -> Strategy:
    try:
        return Strategy(strategy)
    except ValueError as e:
        raise ParameterRangeError(f"Unknown strategy: {strategy}") from e


def _coerce_placement(placement: Union[Placement, str]) -> Placement:
    try:
        return Placement(placement)
    except ValueError as e:
        raise ParameterRangeError(f"Unknown placement: {placement}") from e


def require_nekrasov(A: SquareMatrix) -> NekrasovProfile:
    """
    Profile A and insist on the Nekrasov property.

    Raises:
        NotNekrasovError: With the first failing 1-based row
        ZeroDiagonalError: If some a_ii is zero
    """
    prof = profile(A)
    if not prof.is_nekrasov:
        raise NotNekrasovError(prof.first_failing_row or 1)
    return prof


def find_pivot_k(A: SquareMatrix) -> int:
    """
    Smallest 1-based k such that a_kj = 0 for every j > k.

    Row n always qualifies, so the result lies in 1..n.
    """
    upper = np.triu(A.entries, k=1)
    for i in range(A.n):
        if not np.any(upper[i]):
            return i + 1
    return A.n  # unreachable, row n has an empty upper part


def _check_ts(ts: Union[float, Sequence[float], np.ndarray]) -> np.ndarray:
    values = np.atleast_1d(np.asarray(ts, dtype=float))
    if values.ndim != 1 or values.size == 0:
        raise ParameterRangeError("t must be a scalar or a non-empty 1-D sequence")
    bad = values[~((values > 0.0) & (values < 1.0))]
    if bad.size:
        raise ParameterRangeError(f"t must lie in (0, 1), got {float(bad[0])}")
    return values


def _epsilon_rows(
    abs_a: np.ndarray,
    diag: np.ndarray,
    delta: np.ndarray,
    ts: np.ndarray,
    start: int,
    placement: Placement,
) -> np.ndarray:
    """Build one eps row per t; rows before `start` stay zero."""
    n = diag.shape[0]
    m = ts.shape[0]
    eps = np.zeros((m, n))
    rescales = 0

    if placement is Placement.DELTA:
        eps[:, start:] = ts[:, None] * delta[None, start:]

    for i in range(start, n):
        # w_i only sees free rows; eps is zero before start
        w = eps[:, start:i] @ (abs_a[i, start:i] / diag[start:i]) if i > start else np.zeros(m)

        if placement is Placement.INTERVAL:
            inside = w < delta[i]
            eps[:, i] = np.where(inside, w + ts * (delta[i] - w), ts * delta[i])

        needs_rescale = w >= eps[:, i]
        if np.any(needs_rescale):
            factor = np.ones(m)
            factor[needs_rescale] = eps[needs_rescale, i] / (2.0 * w[needs_rescale])
            eps[:, start:i] *= factor[:, None]
            rescales += int(needs_rescale.sum())

    if rescales:
        logger.debug(f"Rescaled earlier epsilons {rescales} time(s) over {m} plan(s)")
    return eps


def epsilon_grid(
    A: SquareMatrix,
    ts: Union[float, Sequence[float], np.ndarray],
    strategy: Union[Strategy, str] = Strategy.PIVOT,
    placement: Union[Placement, str] = Placement.DELTA,
) -> Tuple[int, np.ndarray]:
    """
    Build epsilon vectors for many values of t at once.

    Args:
        A: Nekrasov matrix
        ts: Values of t, each in (0, 1)
        strategy: FULL or PIVOT
        placement: DELTA or INTERVAL

    Returns:
        Tuple of (1-based pivot k, array of shape (len(ts), n))

    Raises:
        NotNekrasovError: If A is not Nekrasov
        ParameterRangeError: If some t lies outside (0, 1)
    """
    strategy = _coerce_strategy(strategy)
    placement = _coerce_placement(placement)
    values = _check_ts(ts)
    prof = require_nekrasov(A)

    k = find_pivot_k(A) if strategy is Strategy.PIVOT else 1
    eps = _epsilon_rows(A.abs_entries, A.abs_diagonal, prof.delta, values, k - 1, placement)
    return k, eps


def epsilon_plan(
    A: SquareMatrix,
    strategy: Union[Strategy, str] = Strategy.PIVOT,
    t: float = DEFAULT_T,
    placement: Union[Placement, str] = Placement.DELTA,
) -> EpsilonPlan:
    """
    Build a single epsilon plan for A.

    Args:
        A: Nekrasov matrix
        strategy: FULL or PIVOT
        t: Initialization fraction in (0, 1)
        placement: DELTA or INTERVAL

    Returns:
        EpsilonPlan satisfying every inequality of its strategy
    """
    strategy = _coerce_strategy(strategy)
    placement = _coerce_placement(placement)
    k, eps = epsilon_grid(A, [t], strategy, placement)
    plan = EpsilonPlan(strategy=strategy, k=k, eps=eps[0], t=float(t), placement=placement)
    logger.debug(f"Built {strategy.value} plan k={k} t={t}: eps={plan.eps.tolist()}")
    return plan


def pivot_epsilon_plan(
    A: SquareMatrix,
    t: float = DEFAULT_T,
    placement: Union[Placement, str] = Placement.DELTA,
) -> EpsilonPlan:
    """Plan with free epsilons from the pivot row on."""
    return epsilon_plan(A, Strategy.PIVOT, t, placement)


def full_epsilon_plan(
    A: SquareMatrix,
    t: float = DEFAULT_T,
    placement: Union[Placement, str] = Placement.DELTA,
) -> EpsilonPlan:
    """Plan with a free epsilon on every row."""
    return epsilon_plan(A, Strategy.FULL, t, placement)


def explicit_plan(
    A: SquareMatrix,
    eps: Sequence[float],
    strategy: Union[Strategy, str] = Strategy.PIVOT,
) -> EpsilonPlan:
    """
    Wrap a given epsilon vector as a plan without validating it.

    Args:
        A: Matrix the plan is meant for (used to locate the pivot)
        eps: Epsilon vector
        strategy: Strategy whose inequalities the plan should satisfy

    Returns:
        EpsilonPlan with t and placement unset
    """
    strategy = _coerce_strategy(strategy)
    k = find_pivot_k(A) if strategy is Strategy.PIVOT else 1
    return EpsilonPlan(strategy=strategy, k=k, eps=np.asarray(eps, dtype=float))


def validate_plan(A: SquareMatrix, plan: EpsilonPlan) -> PlanCheck:
    """
    Re-check every inequality of the plan's strategy against A.

    Never raises; problems are returned as violations.

    Args:
        A: Matrix
        plan: Plan to check

    Returns:
        PlanCheck listing each violated inequality with its 1-based row
    """
    violations: List[PlanViolation] = []
    n = A.n

    if plan.n != n:
        violations.append(
            PlanViolation(None, "length", f"plan has {plan.n} entries, matrix has n={n}")
        )
        return PlanCheck(valid=False, violations=violations)

    try:
        prof = profile(A)
    except ZeroDiagonalError as e:
        violations.append(PlanViolation(e.row, "nonzero diagonal", str(e)))
        return PlanCheck(valid=False, violations=violations)

    eps = plan.eps
    delta = prof.delta
    abs_a = A.abs_entries
    diag = A.abs_diagonal
    pivot = find_pivot_k(A) if plan.strategy is Strategy.PIVOT else 1

    if plan.k != pivot:
        violations.append(PlanViolation(None, "pivot", f"plan k={plan.k}, expected k={pivot}"))

    start = pivot - 1
    for i in range(n):
        row = i + 1
        if i < start:
            if not eps[i] == 0:
                violations.append(PlanViolation(row, "eps == 0", f"eps={eps[i]:.6g}"))
            continue

        if not eps[i] > 0:
            violations.append(PlanViolation(row, "eps > 0", f"eps={eps[i]:.6g}"))

        if plan.strategy is Strategy.PIVOT:
            if not eps[i] < delta[i]:
                violations.append(
                    PlanViolation(row, "eps < delta", f"eps={eps[i]:.6g}, delta={delta[i]:.6g}")
                )
        elif not eps[i] <= delta[i]:
            violations.append(
                PlanViolation(row, "eps <= delta", f"eps={eps[i]:.6g}, delta={delta[i]:.6g}")
            )

        if i > start:
            w = float(abs_a[i, start:i] @ (eps[start:i] / diag[start:i]))
            if not eps[i] > w:
                violations.append(PlanViolation(row, "eps > w", f"eps={eps[i]:.6g}, w={w:.6g}"))

    return PlanCheck(valid=not violations, violations=violations)


def scaling_vector(A: SquareMatrix, eps: np.ndarray, h: Optional[np.ndarray] = None) -> np.ndarray:
    """s = (h + eps) / |diag|, broadcast over leading plan dimensions."""
    h_vals = profile(A).h if h is None else h
    return (h_vals + eps) / A.abs_diagonal


def build_scaling(A: SquareMatrix, plan: EpsilonPlan) -> ScalingMatrix:
    """
    Build S with s_i = (h_i(A) + eps_i) / |a_ii|.

    Args:
        A: Matrix
        plan: Epsilon plan for A

    Returns:
        ScalingMatrix

    Raises:
        InvalidPlanError: If validate_plan reports any violation
    """
    check = validate_plan(A, plan)
    if not check.valid:
        raise InvalidPlanError(check.violations)
    return ScalingMatrix(scaling_vector(A, plan.eps))


def apply_scaling(A: SquareMatrix, S: ScalingMatrix) -> SquareMatrix:
    """
    Right-scale A: (AS)_ij = a_ij * s_j.

    Raises:
        DimensionMismatchError: If S does not match A
    """
    if S.n != A.n:
        raise DimensionMismatchError(f"Scaling of size {S.n} cannot scale a {A.n}x{A.n} matrix")
    return SquareMatrix(A.entries * S.s[None, :])
