"""
Exact reference oracles used to check every bound.

Inverse norms come from an explicit inverse built by Gaussian elimination
with partial pivoting; the minimal singular value comes from power
iteration on (A^T A)^{-1}, applied as two triangular solve passes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Union

import numpy as np

from nekscale.core.matrix import (
    DimensionMismatchError,
    NoConvergenceError,
    SingularMatrixError,
    SquareMatrix,
)
from nekscale.utils.logging import get_logger


logger = get_logger(__name__)

DEFAULT_PIVOT_TOLERANCE = 1e-12
DEFAULT_POWER_TOLERANCE = 1e-10
DEFAULT_POWER_MAX_ITERATIONS = 10_000
POWER_SEED = 20240601

ArrayLike = Union[np.ndarray, list, tuple]


@dataclass(frozen=True)
class LUFactorization:
    """
    Packed PA = LU factorization.

    Attributes:
        lu: unit-lower L below the diagonal, U on and above it
        perm: row permutation, row i of PA is row perm[i] of A
    """

    lu: np.ndarray
    perm: np.ndarray

    @property
    def n(self) -> int:
        return int(self.lu.shape[0])

    def _check_rhs(self, b: ArrayLike) -> np.ndarray:
        rhs = np.array(b, dtype=float)
        if rhs.shape[0] != self.n or rhs.ndim > 2:
            raise DimensionMismatchError(
                f"Right-hand side of shape {rhs.shape} does not match n={self.n}"
            )
        return rhs

    def solve(self, b: ArrayLike) -> np.ndarray:
        """
        Solve A x = b for a vector or for every column of a matrix.

        Raises:
            DimensionMismatchError: If b has the wrong leading dimension
        """
        x = self._check_rhs(b)[self.perm]
        n = self.n
        lu = self.lu
        # Forward substitution with unit L
        for i in range(1, n):
            x[i] -= lu[i, :i] @ x[:i]
        # Back substitution with U
        for i in range(n - 1, -1, -1):
            x[i] = (x[i] - lu[i, i + 1:] @ x[i + 1:]) / lu[i, i]
        return x

    def solve_transposed(self, b: ArrayLike) -> np.ndarray:
        """
        Solve A^T x = b using the same factors.

        Since A^T = U^T L^T P, solve U^T z = b, then L^T w = z, then x = P^T w.
        """
        z = self._check_rhs(b)
        n = self.n
        lu = self.lu
        for i in range(n):
            z[i] = (z[i] - lu[:i, i] @ z[:i]) / lu[i, i]
        for i in range(n - 2, -1, -1):
            z[i] -= lu[i + 1:, i] @ z[i + 1:]
        x = np.empty_like(z)
        x[self.perm] = z
        return x


def lu_factor(
    A: SquareMatrix,
    pivot_tolerance: float = DEFAULT_PIVOT_TOLERANCE
) -> LUFactorization:
    """
    Factor PA = LU by Doolittle elimination with partial pivoting.

    Args:
        A: Matrix to factor
        pivot_tolerance: A pivot counts as zero when |pivot| <= tolerance * max|a_ij|

    Returns:
        LUFactorization of A

    Raises:
        SingularMatrixError: If a pivot falls below the threshold
    """
    lu = np.array(A.entries, dtype=float)
    n = A.n
    perm = np.arange(n)
    scale = float(np.abs(lu).max())
    threshold = pivot_tolerance * scale

    if scale == 0.0:
        raise SingularMatrixError("Matrix is zero")

    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if abs(lu[p, k]) <= threshold:
            raise SingularMatrixError(
                f"Pivot {abs(lu[p, k]):.3e} in column {k + 1} is below "
                f"threshold {threshold:.3e}"
            )
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        lu[k + 1:, k] /= lu[k, k]
        lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])

    return LUFactorization(lu=lu, perm=perm)


def solve(
    A: SquareMatrix,
    b: ArrayLike,
    pivot_tolerance: float = DEFAULT_PIVOT_TOLERANCE
) -> np.ndarray:
    """Solve A x = b by elimination."""
    return lu_factor(A, pivot_tolerance).solve(b)


def inverse(
    A: SquareMatrix,
    pivot_tolerance: float = DEFAULT_PIVOT_TOLERANCE
) -> np.ndarray:
    """Explicit inverse, one solve per column of the identity."""
    return lu_factor(A, pivot_tolerance).solve(np.eye(A.n))


def exact_inverse_inf_norm(
    A: SquareMatrix,
    pivot_tolerance: float = DEFAULT_PIVOT_TOLERANCE
) -> float:
    """
    Compute ||A^{-1}||_inf from the explicit inverse.

    Args:
        A: Nonsingular matrix
        pivot_tolerance: Relative singularity threshold

    Returns:
        Maximum absolute row sum of A^{-1}

    Raises:
        SingularMatrixError: If elimination meets a negligible pivot
    """
    inv = inverse(A, pivot_tolerance)
    return float(np.abs(inv).sum(axis=1).max())


def exact_inverse_one_norm(
    A: SquareMatrix,
    pivot_tolerance: float = DEFAULT_PIVOT_TOLERANCE
) -> float:
    """Compute ||A^{-1}||_1 (maximum absolute column sum of the inverse)."""
    inv = inverse(A, pivot_tolerance)
    return float(np.abs(inv).sum(axis=0).max())


def _power_seeds(n: int) -> List[np.ndarray]:
    """All-ones, alternating signs and a fixed-seed Gaussian vector, unit length."""
    seeds = [
        np.ones(n),
        np.where(np.arange(n) % 2 == 0, 1.0, -1.0),
        np.random.default_rng(POWER_SEED).standard_normal(n),
    ]
    return [seed / np.linalg.norm(seed) for seed in seeds]


def _power_iteration(
    factors: LUFactorization,
    x: np.ndarray,
    tolerance: float,
    max_iterations: int,
) -> float:
    estimate = 0.0
    for iteration in range(1, max_iterations + 1):
        y = factors.solve(factors.solve_transposed(x))
        new_estimate = float(x @ y)
        x = y / float(np.linalg.norm(y))

        if iteration > 1 and abs(new_estimate - estimate) <= tolerance * abs(new_estimate):
            logger.debug(f"Power iteration converged after {iteration} iterations")
            return new_estimate
        estimate = new_estimate

    raise NoConvergenceError(
        f"Power iteration did not converge within {max_iterations} iterations",
        iterations=max_iterations,
    )


def sigma_min_oracle(
    A: SquareMatrix,
    tolerance: float = DEFAULT_POWER_TOLERANCE,
    max_iterations: int = DEFAULT_POWER_MAX_ITERATIONS,
    pivot_tolerance: float = DEFAULT_PIVOT_TOLERANCE
) -> float:
    """
    Smallest singular value of A by power iteration on A^{-1} A^{-T}.

    Each step applies A^{-T} then A^{-1} through the LU factors and takes
    the Rayleigh quotient as the estimate of ||A^{-1}||_2^2. A single start
    vector orthogonal to the dominant eigenvector converges to a smaller
    eigenvalue (the all-ones vector does this for [[2, 1], [1, 2]]), so the
    iteration is run from three deterministic seeds and the largest estimate
    is kept.

    Args:
        A: Nonsingular matrix
        tolerance: Stop when the relative change of the estimate is below this
        max_iterations: Iteration cap per seed
        pivot_tolerance: Relative singularity threshold for the factorization

    Returns:
        sigma_min(A) = 1 / ||A^{-1}||_2

    Raises:
        SingularMatrixError: If A is numerically singular
        NoConvergenceError: If the cap is reached first
    """
    factors = lu_factor(A, pivot_tolerance)
    estimate = max(
        _power_iteration(factors, seed, tolerance, max_iterations) for seed in _power_seeds(A.n)
    )
    return float(1.0 / np.sqrt(estimate))
