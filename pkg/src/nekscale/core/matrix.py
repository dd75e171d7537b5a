"""
Dense square matrices and the row recursions behind the Nekrasov test.

Holds the immutable SquareMatrix type, the comparison matrix, the h and z
recursions, and the SDD / Nekrasov classification. Indices reported to
callers (error rows) are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence

import numpy as np

from nekscale.utils.logging import get_logger


logger = get_logger(__name__)


class MatrixError(Exception):
    """Base class for computation errors (failed preconditions)."""
    pass


class DimensionMismatchError(MatrixError):
    """Raised when operands have incompatible shapes."""
    pass


class ZeroDiagonalError(MatrixError):
    """Raised when a recursion needs a nonzero diagonal entry and finds zero."""

    def __init__(self, row: int):
        super().__init__(f"Diagonal entry a[{row},{row}] is zero")
        self.row = row


class SingularMatrixError(MatrixError):
    """Raised when elimination meets a pivot below the singularity threshold."""
    pass


class NoConvergenceError(MatrixError):
    """Raised when an iterative oracle hits its iteration cap."""

    def __init__(self, message: str, iterations: int):
        super().__init__(message)
        self.iterations = iterations


@dataclass(frozen=True, eq=False)
class SquareMatrix:
    """
    Immutable dense n x n real matrix.

    The entries are copied into a read-only float64 array, so a
    SquareMatrix can be shared freely between threads.

    Example:
        >>> A = SquareMatrix.from_rows([[2, 1], [0, 2]])
        >>> A.n
        2
    """

    entries: np.ndarray

    def __post_init__(self):
        """Validate shape and finiteness, then freeze the array."""
        try:
            array = np.array(self.entries, dtype=float)
        except (TypeError, ValueError) as e:
            raise DimensionMismatchError(f"Entries do not form a rectangular array: {e}") from e

        if array.ndim != 2 or array.shape[0] != array.shape[1]:
            raise DimensionMismatchError(f"Matrix must be square, got shape {array.shape}")
        if array.shape[0] < 1:
            raise DimensionMismatchError("Matrix dimension must be at least 1")
        if not np.all(np.isfinite(array)):
            raise MatrixError("Matrix entries must be finite (no NaN or infinity)")

        array.setflags(write=False)
        object.__setattr__(self, "entries", array)

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[float]]) -> "SquareMatrix":
        """Build a matrix from a row-major nested sequence."""
        return cls(np.array([list(row) for row in rows], dtype=float))

    @classmethod
    def identity(cls, n: int) -> "SquareMatrix":
        """Identity matrix of order n."""
        return cls(np.eye(n))

    @classmethod
    def diagonal(cls, values: Sequence[float]) -> "SquareMatrix":
        """Diagonal matrix with the given diagonal."""
        return cls(np.diag(np.asarray(values, dtype=float)))

    @property
    def n(self) -> int:
        """Dimension of the matrix."""
        return int(self.entries.shape[0])

    @property
    def abs_entries(self) -> np.ndarray:
        """Entrywise moduli |a_ij|."""
        return np.abs(self.entries)

    @property
    def abs_diagonal(self) -> np.ndarray:
        """Diagonal moduli |a_ii|."""
        return np.abs(np.diag(self.entries))

    def to_rows(self) -> List[List[float]]:
        """Row-major nested lists of Python floats."""
        return [[float(v) for v in row] for row in self.entries]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SquareMatrix):
            return NotImplemented
        return self.entries.shape == other.entries.shape and bool(
            np.array_equal(self.entries, other.entries)
        )

    def __hash__(self) -> int:
        return hash((self.n, self.entries.tobytes()))

    def __repr__(self) -> str:
        return f"SquareMatrix(n={self.n}, rows={self.to_rows()!r})"


@dataclass(frozen=True)
class NekrasovProfile:
    """
    Per-row recursion values and classification flags of a matrix.

    Attributes:
        h: h_i(A), forward recursion over the rows
        z: z_i(A), forward recursion with unit increments
        delta: |a_ii| - h_i(A)
        is_sdd: strict diagonal dominance by rows
        is_nekrasov: every delta_i is positive
        varah_margins: |a_ii| - sum_{j != i} |a_ij|
    """

    h: np.ndarray
    z: np.ndarray
    delta: np.ndarray
    is_sdd: bool
    is_nekrasov: bool
    varah_margins: np.ndarray

    @property
    def n(self) -> int:
        return int(self.h.shape[0])

    @property
    def first_failing_row(self) -> Optional[int]:
        """First 1-based row with delta_i <= 0, or None for a Nekrasov matrix."""
        failing = np.flatnonzero(~(self.delta > 0))
        return int(failing[0]) + 1 if failing.size else None

    def to_dict(self) -> dict:
        """Convert profile to a JSON-friendly dictionary."""
        return {
            "n": self.n,
            "h": self.h.tolist(),
            "z": self.z.tolist(),
            "delta": self.delta.tolist(),
            "varah_margins": self.varah_margins.tolist(),
            "is_sdd": self.is_sdd,
            "is_nekrasov": self.is_nekrasov,
        }


def comparison_matrix(A: SquareMatrix) -> SquareMatrix:
    """
    Comparison matrix: |a_ii| on the diagonal, -|a_ij| elsewhere.

    Args:
        A: Input matrix

    Returns:
        The comparison matrix M(A)
    """
    result = -A.abs_entries
    np.fill_diagonal(result, A.abs_diagonal)
    return SquareMatrix(result)


def transpose(A: SquareMatrix) -> SquareMatrix:
    """Transpose of A."""
    return SquareMatrix(A.entries.T)


def inf_norm(A: SquareMatrix) -> float:
    """Maximum absolute row sum."""
    return float(A.abs_entries.sum(axis=1).max())


def one_norm(A: SquareMatrix) -> float:
    """Maximum absolute column sum."""
    return float(A.abs_entries.sum(axis=0).max())


def residual_min(x: Sequence[float], y: Sequence[float]) -> np.ndarray:
    """
    Componentwise minimum of two vectors.

    Raises:
        DimensionMismatchError: If the vectors differ in length
    """
    x_arr = np.asarray(x, dtype=float).reshape(-1)
    y_arr = np.asarray(y, dtype=float).reshape(-1)
    if x_arr.shape != y_arr.shape:
        raise DimensionMismatchError(
            f"Vectors have different lengths: {x_arr.size} and {y_arr.size}"
        )
    return np.minimum(x_arr, y_arr)


def varah_margins(A: SquareMatrix) -> np.ndarray:
    """Row margins |a_ii| - sum_{j != i} |a_ij|."""
    abs_a = A.abs_entries
    diag = A.abs_diagonal
    return diag - (abs_a.sum(axis=1) - diag)


def is_sdd(A: SquareMatrix) -> bool:
    """Strict diagonal dominance by rows, compared without tolerance."""
    return bool(np.all(varah_margins(A) > 0))


def _require_nonzero_diagonal(A: SquareMatrix) -> np.ndarray:
    diag = A.abs_diagonal
    zeros = np.flatnonzero(diag == 0)
    if zeros.size:
        raise ZeroDiagonalError(int(zeros[0]) + 1)
    return diag


def h_values(A: SquareMatrix) -> np.ndarray:
    """
    Forward recursion h_i = sum_{j<i} |a_ij| h_j / |a_jj| + sum_{j>i} |a_ij|.

    Row i only reads rows 1..i, so h_1..h_i do not depend on later rows.

    Raises:
        ZeroDiagonalError: If some a_ii is zero
    """
    diag = _require_nonzero_diagonal(A)
    abs_a = A.abs_entries
    n = A.n
    h = np.zeros(n)
    for i in range(n):
        lower = float(abs_a[i, :i] @ (h[:i] / diag[:i])) if i else 0.0
        h[i] = lower + float(abs_a[i, i + 1:].sum())
    return h


def z_values(A: SquareMatrix) -> np.ndarray:
    """
    Forward recursion z_1 = 1, z_i = sum_{j<i} |a_ij| z_j / |a_jj| + 1.

    Raises:
        ZeroDiagonalError: If some a_ii is zero
    """
    diag = _require_nonzero_diagonal(A)
    abs_a = A.abs_entries
    n = A.n
    z = np.ones(n)
    for i in range(1, n):
        z[i] = float(abs_a[i, :i] @ (z[:i] / diag[:i])) + 1.0
    return z


def profile(A: SquareMatrix) -> NekrasovProfile:
    """
    Compute h, z, slack and classification flags of A.

    Args:
        A: Matrix with nonzero diagonal

    Returns:
        NekrasovProfile of A

    Raises:
        ZeroDiagonalError: If some a_ii is zero
    """
    h = h_values(A)
    z = z_values(A)
    delta = A.abs_diagonal - h
    margins = varah_margins(A)
    result = NekrasovProfile(
        h=h,
        z=z,
        delta=delta,
        is_sdd=bool(np.all(margins > 0)),
        is_nekrasov=bool(np.all(delta > 0)),
        varah_margins=margins,
    )
    logger.debug(
        f"Profile n={A.n}: nekrasov={result.is_nekrasov}, sdd={result.is_sdd}, "
        f"min delta={float(delta.min()):.6g}"
    )
    return result
