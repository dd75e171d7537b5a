"""
Upper bounds on ||A^{-1}|| for SDD and Nekrasov matrices.

Bounds available:
- varah: 1 / min row margin, SDD matrices only
- scaled: ||S||_inf / min_i(eps_i - w_i + p_i) for a scaling S built from a plan
- scaled-unit: the same with numerator 1
- z-bound: max_i z_i(A) / (|a_ii| - h_i(A))
- scaled-z: ||S||_inf * max_i z_i(A) / (|a_ii| s_i - h_i(AS))
- one-norm: the scaled bound applied to A^T, bounding ||A^{-1}||_1
- sigma-min: a lower bound on the smallest singular value from A and A^T

The parametrized bounds can also be swept over a grid of t values; the
sweep is vectorized over the grid and the winner is re-evaluated through
the single-plan path.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Dict, Optional, Tuple, Union

import numpy as np

from nekscale.core.matrix import (
    MatrixError,
    NekrasovProfile,
    SquareMatrix,
    profile,
    transpose,
    varah_margins,
)
from nekscale.core.scaling import (
    DEFAULT_T,
    EpsilonPlan,
    NotNekrasovError,
    ParameterRangeError,
    Placement,
    Strategy,
    apply_scaling,
    build_scaling,
    epsilon_grid,
    epsilon_plan,
    require_nekrasov,
)
from nekscale.utils.logging import get_logger


logger = get_logger(__name__)

DEFAULT_GRID_SIZE = 10_000


class NotSDDError(MatrixError):
    """Raised when a bound requires strict diagonal dominance."""

    def __init__(self, row: int):
        super().__init__(f"Matrix is not SDD: row {row} has a nonpositive margin")
        self.row = row


class TransposeNotNekrasovError(NotNekrasovError):
    """Raised when a bound requires A^T to be Nekrasov."""

    def __init__(self, row: int):
        super().__init__(row, f"Transpose is not Nekrasov: failing row {row}")


class BoundMethod(str, Enum):
    """Available bound methods, valued by their command-line names."""
    VARAH = "varah"
    SCALED = "scaled"
    SCALED_UNIT = "scaled-unit"
    Z_BOUND = "z-bound"
    SCALED_Z = "scaled-z"
    ONE_NORM = "one-norm"
    SIGMA_MIN = "sigma-min"

    @classmethod
    def _missing_(cls, value: object) -> Optional["BoundMethod"]:
        if isinstance(value, str):
            return METHOD_ALIASES.get(value.lower())
        return None

    @property
    def is_parametrized(self) -> bool:
        return self not in (BoundMethod.VARAH, BoundMethod.Z_BOUND)

    @property
    def is_lower_bound(self) -> bool:
        return self is BoundMethod.SIGMA_MIN


# Published method names
METHOD_ALIASES: Dict[str, BoundMethod] = {
    "cotanek": BoundMethod.SCALED,
    "cor34": BoundMethod.SCALED_UNIT,
    "cotak": BoundMethod.Z_BOUND,
    "cotarev": BoundMethod.SCALED_Z,
    "onenorm": BoundMethod.ONE_NORM,
    "sigmamin": BoundMethod.SIGMA_MIN,
}


@dataclass(frozen=True)
class BoundReport:
    """
    A bound value with the quantities that produced it.

    For every method except sigma-min, value = numerator / min(row_margins)
    and argmin_row is the first 1-based row attaining that minimum.

    Attributes:
        method: Bound method
        value: The bound
        numerator: ||S||_inf for scaled methods, 1 otherwise
        row_margins: Per-row denominators
        argmin_row: First row attaining the minimal margin
        plan: Epsilon plan (parametrized methods)
        w: w_i = sum_{j<i} |a_ij| eps_j / |a_jj| (parametrized methods)
        p: p_i = sum_{j>i} |a_ij| (|a_jj| - h_j - eps_j) / |a_jj|
        t: Initialization fraction of the plan
        companion: Report on A^T (sigma-min)
    """

    method: BoundMethod
    value: float
    numerator: float
    row_margins: np.ndarray
    argmin_row: int
    plan: Optional[EpsilonPlan] = None
    w: Optional[np.ndarray] = None
    p: Optional[np.ndarray] = None
    t: Optional[float] = None
    companion: Optional["BoundReport"] = None

    def to_dict(self) -> Dict[str, Any]:
        """Convert report to a JSON-friendly dictionary."""
        return {
            "method": self.method.value,
            "value": self.value,
            "numerator": self.numerator,
            "row_margins": self.row_margins.tolist(),
            "argmin_row": self.argmin_row,
            "t": self.t,
            "plan": self.plan.to_dict() if self.plan else None,
            "w": self.w.tolist() if self.w is not None else None,
            "p": self.p.tolist() if self.p is not None else None,
            "companion": self.companion.to_dict() if self.companion else None,
        }


def _coerce_method(method: Union[BoundMethod, str]) -> BoundMethod:
    try:
        return BoundMethod(method)
    except ValueError as e:
        raise ParameterRangeError(f"Unknown bound method: {method}") from e


def _first_min_row(margins: np.ndarray) -> int:
    return int(np.argmin(margins)) + 1


def _require_transpose_nekrasov(A: SquareMatrix) -> Tuple[SquareMatrix, NekrasovProfile]:
    At = transpose(A)
    prof = profile(At)
    if not prof.is_nekrasov:
        raise TransposeNotNekrasovError(prof.first_failing_row or 1)
    return At, prof


def _margin_grid(
    abs_a: np.ndarray,
    diag: np.ndarray,
    h: np.ndarray,
    eps: np.ndarray,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """w, p and eps - w + p for every row of eps (shape (m, n))."""
    lower = np.tril(abs_a, k=-1)
    upper = np.triu(abs_a, k=1)
    w = (eps / diag) @ lower.T
    p = ((diag - h - eps) / diag) @ upper.T
    return w, p, eps - w + p


def _scaled_h_grid(abs_a: np.ndarray, diag: np.ndarray, s: np.ndarray) -> np.ndarray:
    """h(AS) for every row of s, using h_i(AS) = sum_{j<i} |a_ij| h_j(AS)/|a_jj| + sum_{j>i} |a_ij| s_j."""
    m, n = s.shape
    h = np.zeros((m, n))
    for i in range(n):
        h[:, i] = s[:, i + 1:] @ abs_a[i, i + 1:]
        if i:
            h[:, i] += h[:, :i] @ (abs_a[i, :i] / diag[:i])
    return h


def scaled_margins(
    A: SquareMatrix,
    plan: EpsilonPlan,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Compute w, p and the margins eps - w + p of a plan.

    Each margin equals the SDD row margin of AS.

    Args:
        A: Matrix with nonzero diagonal
        plan: Epsilon plan for A

    Returns:
        Tuple of (w, p, margins)
    """
    w, p, margins = _margin_grid(A.abs_entries, A.abs_diagonal, profile(A).h, plan.eps[None, :])
    return w[0], p[0], margins[0]


def varah_bound(A: SquareMatrix) -> BoundReport:
    """
    Varah's bound 1 / min_i(|a_ii| - sum_{j != i} |a_ij|).

    Raises:
        NotSDDError: If some row margin is not positive
    """
    margins = varah_margins(A)
    failing = np.flatnonzero(~(margins > 0))
    if failing.size:
        raise NotSDDError(int(failing[0]) + 1)
    return BoundReport(
        method=BoundMethod.VARAH,
        value=float(1.0 / margins.min()),
        numerator=1.0,
        row_margins=margins,
        argmin_row=_first_min_row(margins),
    )


def _scaled_report(
    A: SquareMatrix,
    plan: EpsilonPlan,
    method: BoundMethod,
) -> BoundReport:
    require_nekrasov(A)
    S = build_scaling(A, plan)
    w, p, margins = scaled_margins(A, plan)
    numerator = S.norm if method is BoundMethod.SCALED else 1.0
    return BoundReport(
        method=method,
        value=float(numerator / margins.min()),
        numerator=float(numerator),
        row_margins=margins,
        argmin_row=_first_min_row(margins),
        plan=plan,
        w=w,
        p=p,
        t=plan.t,
    )


def scaled_bound(A: SquareMatrix, plan: EpsilonPlan) -> BoundReport:
    """
    Scaled bound ||S||_inf / min_i(eps_i - w_i + p_i).

    Args:
        A: Nekrasov matrix
        plan: Valid epsilon plan for A

    Returns:
        BoundReport with w, p and the plan

    Raises:
        NotNekrasovError: If A is not Nekrasov
        InvalidPlanError: If the plan violates its inequalities
    """
    return _scaled_report(A, plan, BoundMethod.SCALED)


def unit_scaled_bound(A: SquareMatrix, plan: EpsilonPlan) -> BoundReport:
    """Scaled bound with numerator 1; never below scaled_bound on the same plan."""
    return _scaled_report(A, plan, BoundMethod.SCALED_UNIT)


def z_bound(A: SquareMatrix) -> BoundReport:
    """
    Bound max_i z_i(A) / (|a_ii| - h_i(A)).

    Row margins are delta_i / z_i, so value = 1 / min(row_margins).

    Raises:
        NotNekrasovError: If A is not Nekrasov
    """
    prof = require_nekrasov(A)
    margins = prof.delta / prof.z
    return BoundReport(
        method=BoundMethod.Z_BOUND,
        value=float(1.0 / margins.min()),
        numerator=1.0,
        row_margins=margins,
        argmin_row=_first_min_row(margins),
    )


def scaled_z_bound(A: SquareMatrix, plan: EpsilonPlan) -> BoundReport:
    """
    Bound ||S||_inf * max_i z_i(A) / (h_i(A) + eps_i - h_i(AS)).

    h(AS) is obtained by running the recursion on the scaled matrix.

    Args:
        A: Nekrasov matrix
        plan: Valid epsilon plan for A

    Returns:
        BoundReport whose row margins are (h_i + eps_i - h_i(AS)) / z_i

    Raises:
        NotNekrasovError: If A is not Nekrasov
        InvalidPlanError: If the plan violates its inequalities
    """
    prof = require_nekrasov(A)
    S = build_scaling(A, plan)
    scaled_h = profile(apply_scaling(A, S)).h
    margins = (prof.h + plan.eps - scaled_h) / prof.z
    w, p, _ = scaled_margins(A, plan)
    return BoundReport(
        method=BoundMethod.SCALED_Z,
        value=float(S.norm / margins.min()),
        numerator=S.norm,
        row_margins=margins,
        argmin_row=_first_min_row(margins),
        plan=plan,
        w=w,
        p=p,
        t=plan.t,
    )


def one_norm_bound(
    A: SquareMatrix,
    t: float = DEFAULT_T,
    strategy: Union[Strategy, str] = Strategy.PIVOT,
    placement: Union[Placement, str] = Placement.DELTA,
) -> BoundReport:
    """
    Bound on ||A^{-1}||_1 = ||A^{-T}||_inf from the scaled bound on A^T.

    Raises:
        TransposeNotNekrasovError: If A^T is not Nekrasov
    """
    At, _ = _require_transpose_nekrasov(A)
    plan = epsilon_plan(At, strategy, t, placement)
    report = scaled_bound(At, plan)
    return BoundReport(
        method=BoundMethod.ONE_NORM,
        value=report.value,
        numerator=report.numerator,
        row_margins=report.row_margins,
        argmin_row=report.argmin_row,
        plan=plan,
        w=report.w,
        p=report.p,
        t=plan.t,
    )


def sigma_min_bound(
    A: SquareMatrix,
    t: float = DEFAULT_T,
    strategy: Union[Strategy, str] = Strategy.PIVOT,
    placement: Union[Placement, str] = Placement.DELTA,
) -> BoundReport:
    """
    Lower bound on the smallest singular value of A.

    Combines the scaled bounds on ||A^{-1}||_inf and ||A^{-1}||_1 (the
    latter from A^T, with its own plan at the same t):
    sigma_min >= 1 / sqrt(bound_inf * bound_one).

    Args:
        A: Matrix such that A and A^T are both Nekrasov
        t: Initialization fraction for both plans
        strategy: Plan strategy for both plans
        placement: Plan placement for both plans

    Returns:
        BoundReport for A with the A^T report attached as companion

    Raises:
        NotNekrasovError: If A is not Nekrasov
        TransposeNotNekrasovError: If A^T is not Nekrasov
    """
    require_nekrasov(A)
    At, _ = _require_transpose_nekrasov(A)
    direct = scaled_bound(A, epsilon_plan(A, strategy, t, placement))
    companion = scaled_bound(At, epsilon_plan(At, strategy, t, placement))
    value = float(np.sqrt(1.0 / (direct.value * companion.value)))
    return BoundReport(
        method=BoundMethod.SIGMA_MIN,
        value=value,
        numerator=direct.numerator,
        row_margins=direct.row_margins,
        argmin_row=direct.argmin_row,
        plan=direct.plan,
        w=direct.w,
        p=direct.p,
        t=float(t),
        companion=companion,
    )


def _single_plan(
    bound: Callable[[SquareMatrix, EpsilonPlan], BoundReport]
) -> Callable[..., BoundReport]:
    def evaluate(A, t=DEFAULT_T, strategy=Strategy.PIVOT, placement=Placement.DELTA):
        return bound(A, epsilon_plan(A, strategy, t, placement))
    return evaluate


def _parameter_free(bound: Callable[[SquareMatrix], BoundReport]) -> Callable[..., BoundReport]:
    def evaluate(A, t=DEFAULT_T, strategy=Strategy.PIVOT, placement=Placement.DELTA):
        return bound(A)
    return evaluate


# Every entry takes (A, t, strategy, placement)
BOUND_METHODS: Dict[BoundMethod, Callable[..., BoundReport]] = {
    BoundMethod.VARAH: _parameter_free(varah_bound),
    BoundMethod.SCALED: _single_plan(scaled_bound),
    BoundMethod.SCALED_UNIT: _single_plan(unit_scaled_bound),
    BoundMethod.Z_BOUND: _parameter_free(z_bound),
    BoundMethod.SCALED_Z: _single_plan(scaled_z_bound),
    BoundMethod.ONE_NORM: one_norm_bound,
    BoundMethod.SIGMA_MIN: sigma_min_bound,
}


def evaluate_bound(
    A: SquareMatrix,
    method: Union[BoundMethod, str],
    t: float = DEFAULT_T,
    strategy: Union[Strategy, str] = Strategy.PIVOT,
    placement: Union[Placement, str] = Placement.DELTA,
) -> BoundReport:
    """
    Evaluate one bound method by name.

    Args:
        A: Input matrix
        method: Bound method or its command-line name
        t: Initialization fraction (ignored by varah and z-bound)
        strategy: Plan strategy
        placement: Plan placement

    Returns:
        BoundReport
    """
    method = _coerce_method(method)
    report = BOUND_METHODS[method](A, t, strategy, placement)
    logger.debug(f"Bound {method.value} on n={A.n}: {report.value:.6g}")
    return report


def _scaled_value_grid(
    A: SquareMatrix,
    ts: np.ndarray,
    strategy: Union[Strategy, str],
    placement: Union[Placement, str],
    method: BoundMethod,
) -> np.ndarray:
    prof = require_nekrasov(A)
    abs_a = A.abs_entries
    diag = A.abs_diagonal
    _, eps = epsilon_grid(A, ts, strategy, placement)
    s = (prof.h + eps) / diag

    if method is BoundMethod.SCALED_Z:
        scaled_h = _scaled_h_grid(abs_a, diag, s)
        ratios = prof.z / (prof.h + eps - scaled_h)
        return s.max(axis=1) * ratios.max(axis=1)

    _, _, margins = _margin_grid(abs_a, diag, prof.h, eps)
    numerator = s.max(axis=1) if method is BoundMethod.SCALED else 1.0
    return numerator / margins.min(axis=1)


def sweep_values(
    A: SquareMatrix,
    method: Union[BoundMethod, str],
    ts: np.ndarray,
    strategy: Union[Strategy, str] = Strategy.PIVOT,
    placement: Union[Placement, str] = Placement.DELTA,
) -> np.ndarray:
    """
    Evaluate a parametrized bound at every t in ts.

    Raises:
        ParameterRangeError: For methods without a parameter
    """
    method = _coerce_method(method)
    ts = np.asarray(ts, dtype=float)

    if not method.is_parametrized:
        raise ParameterRangeError(f"Method {method.value} has no parameter to sweep")

    if method is BoundMethod.ONE_NORM:
        At, _ = _require_transpose_nekrasov(A)
        return _scaled_value_grid(At, ts, strategy, placement, BoundMethod.SCALED)

    if method is BoundMethod.SIGMA_MIN:
        direct = _scaled_value_grid(A, ts, strategy, placement, BoundMethod.SCALED)
        At, _ = _require_transpose_nekrasov(A)
        companion = _scaled_value_grid(At, ts, strategy, placement, BoundMethod.SCALED)
        return np.sqrt(1.0 / (direct * companion))

    return _scaled_value_grid(A, ts, strategy, placement, method)


def optimize_t(
    A: SquareMatrix,
    method: Union[BoundMethod, str],
    grid_size: int = DEFAULT_GRID_SIZE,
    strategy: Union[Strategy, str] = Strategy.PIVOT,
    placement: Union[Placement, str] = Placement.DELTA,
) -> Tuple[float, BoundReport]:
    """
    Sweep t over {j / (grid_size + 1) : j = 1..grid_size}.

    Upper bounds are minimized and the sigma-min lower bound is maximized;
    the first optimal t wins on ties.

    Args:
        A: Input matrix
        method: Parametrized bound method
        grid_size: Number of grid points, at least 2
        strategy: Plan strategy
        placement: Plan placement

    Returns:
        Tuple of (best t, BoundReport at that t)

    Raises:
        ParameterRangeError: If grid_size < 2 or the method has no parameter
    """
    method = _coerce_method(method)
    if grid_size < 2:
        raise ParameterRangeError(f"grid_size must be at least 2, got {grid_size}")

    ts = np.arange(1, grid_size + 1) / (grid_size + 1)
    values = sweep_values(A, method, ts, strategy, placement)
    best = int(np.argmax(values)) if method.is_lower_bound else int(np.argmin(values))
    t_best = float(ts[best])

    logger.debug(
        f"Sweep {method.value} over {grid_size} points: best t={t_best:.6g}, "
        f"value={float(values[best]):.6g}"
    )
    return t_best, evaluate_bound(A, method, t_best, strategy, placement)
