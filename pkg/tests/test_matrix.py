"""
Unit tests for the matrix module.
"""

import numpy as np
import pytest

from nekscale.core.matrix import (
    DimensionMismatchError,
    MatrixError,
    SquareMatrix,
    ZeroDiagonalError,
    comparison_matrix,
    h_values,
    inf_norm,
    is_sdd,
    one_norm,
    profile,
    residual_min,
    transpose,
    varah_margins,
    z_values,
)
from nekscale.repro.fixtures import eps_family


class TestSquareMatrix:
    """Tests for the SquareMatrix type."""

    def test_from_rows(self):
        """Test building a matrix from nested lists."""
        A = SquareMatrix.from_rows([[2, 1], [0, 2]])

        assert A.n == 2
        assert A.to_rows() == [[2.0, 1.0], [0.0, 2.0]]

    def test_entries_are_read_only(self):
        """Test that the stored array cannot be modified."""
        A = SquareMatrix.identity(2)

        with pytest.raises(ValueError):
            A.entries[0, 0] = 5.0

    def test_source_array_is_copied(self):
        """Test that later changes to the source do not leak in."""
        source = np.eye(2)
        A = SquareMatrix(source)
        source[0, 0] = 7.0

        assert A.entries[0, 0] == 1.0

    def test_not_square(self):
        """Test error for a rectangular array."""
        with pytest.raises(DimensionMismatchError):
            SquareMatrix(np.zeros((2, 3)))

    def test_ragged_rows(self):
        """Test error for rows of different lengths."""
        with pytest.raises(DimensionMismatchError):
            SquareMatrix.from_rows([[1, 2], [3]])

    def test_empty(self):
        """Test that n must be at least 1."""
        with pytest.raises(DimensionMismatchError):
            SquareMatrix(np.zeros((0, 0)))

    @pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
    def test_non_finite(self, bad):
        """Test that NaN and infinity are rejected."""
        with pytest.raises(MatrixError):
            SquareMatrix.from_rows([[1, bad], [0, 1]])

    def test_equality_and_hash(self):
        """Test exact equality and hashing."""
        A = SquareMatrix.from_rows([[1, 2], [3, 4]])
        B = SquareMatrix.from_rows([[1.0, 2.0], [3.0, 4.0]])

        assert A == B
        assert hash(A) == hash(B)
        assert A != SquareMatrix.identity(2)

    def test_diagonal_constructor(self):
        """Test the diagonal constructor."""
        D = SquareMatrix.diagonal([2, 4])

        assert D.to_rows() == [[2.0, 0.0], [0.0, 4.0]]


class TestBasicOperations:
    """Tests for comparison matrix, transpose, norms and residual_min."""

    def test_comparison_matrix_identity(self):
        """Test that the identity is its own comparison matrix."""
        assert comparison_matrix(SquareMatrix.identity(3)) == SquareMatrix.identity(3)

    def test_comparison_matrix_signs(self):
        """Test the comparison matrix of a 2x2 example."""
        A = SquareMatrix.from_rows([[-7, 1], [7, 88]])

        assert comparison_matrix(A).to_rows() == [[7.0, -1.0], [-7.0, 88.0]]

    def test_comparison_matrix_fixed_point(self, a5):
        """Test a matrix with positive diagonal and negative off-diagonal entries."""
        assert comparison_matrix(a5) == a5

    def test_transpose(self):
        """Test transposition."""
        A = SquareMatrix.from_rows([[1, 2], [3, 4]])

        assert transpose(A).to_rows() == [[1.0, 3.0], [2.0, 4.0]]

    def test_norms(self):
        """Test the row-sum and column-sum norms."""
        A = SquareMatrix.from_rows([[1, -2], [3, 4]])

        assert inf_norm(SquareMatrix.identity(3)) == 1.0
        assert inf_norm(A) == 7.0
        assert one_norm(A) == 6.0

    def test_residual_min(self):
        """Test the componentwise minimum."""
        result = residual_min([1, 0, 2], [0, 5, -1])

        np.testing.assert_array_equal(result, [0.0, 0.0, -1.0])

    def test_residual_min_length_mismatch(self):
        """Test error for vectors of different lengths."""
        with pytest.raises(DimensionMismatchError):
            residual_min([1, 2], [1, 2, 3])


class TestRecursions:
    """Tests for the h and z recursions."""

    def test_identity_profile(self):
        """Test the profile of the identity."""
        prof = profile(SquareMatrix.identity(4))

        np.testing.assert_array_equal(prof.h, np.zeros(4))
        np.testing.assert_array_equal(prof.z, np.ones(4))
        assert prof.is_nekrasov
        assert prof.is_sdd
        assert prof.first_failing_row is None

    def test_a5_profile(self, a5):
        """Test h and z of a Nekrasov matrix that is not SDD."""
        prof = profile(a5)

        np.testing.assert_allclose(prof.h, [5.0, 53.0 / 6.0, 8.2424242424], rtol=1e-9)
        np.testing.assert_allclose(prof.z, [1.0, 7.0 / 6.0, 2.4848484848], rtol=1e-9)
        assert prof.is_nekrasov
        # Row 3 has |a_33| equal to its off-diagonal sum
        assert not prof.is_sdd
        assert prof.varah_margins[2] == 0.0

    def test_a1_profile(self, a1):
        """Test the h values of a matrix with a negative diagonal entry."""
        h = h_values(a1)

        np.testing.assert_allclose(h, [3.2, 8.2, 2.960877, 0.735877], atol=1e-6)

    def test_eps_family_profile(self):
        """Test h on the one-parameter family at eps = 0.05."""
        h = h_values(eps_family(0.05))

        np.testing.assert_allclose(h, [3.0, 1.9625, 1.73125], rtol=1e-12)

    def test_one_by_one(self):
        """Test the base case of the recursion."""
        prof = profile(SquareMatrix.from_rows([[-3.0]]))

        assert prof.h.tolist() == [0.0]
        assert prof.z.tolist() == [1.0]
        assert prof.is_nekrasov

    def test_zero_diagonal(self):
        """Test error when a diagonal entry is zero."""
        A = SquareMatrix.from_rows([[1, 1, 0], [1, 0, 1], [0, 1, 1]])

        with pytest.raises(ZeroDiagonalError) as exc_info:
            profile(A)
        assert exc_info.value.row == 2

    def test_zero_diagonal_in_z(self):
        """Test that z also requires a nonzero diagonal."""
        with pytest.raises(ZeroDiagonalError):
            z_values(SquareMatrix.from_rows([[0, 1], [1, 1]]))

    def test_not_nekrasov_first_failing_row(self):
        """Test that the first failing row is reported 1-based."""
        A = SquareMatrix.from_rows([[4, 1, 1], [1, 4, 1], [3, 3, 1]])
        prof = profile(A)

        assert not prof.is_nekrasov
        assert prof.first_failing_row == 3

    def test_prefix_property(self, a1):
        """Test that changing a later row leaves earlier h values untouched."""
        entries = np.array(a1.entries)
        entries[3] = [9.0, -9.0, 9.0, 50.0]
        changed = SquareMatrix(entries)

        np.testing.assert_array_equal(h_values(changed)[:3], h_values(a1)[:3])

    def test_z_invariant_under_column_scaling(self, a5):
        """Test that z(AD) equals z(A) for a positive diagonal D."""
        scaled = SquareMatrix(a5.entries * np.array([0.3, 2.0, 0.7])[None, :])

        np.testing.assert_allclose(z_values(scaled), z_values(a5), rtol=1e-12)

    def test_varah_margins(self, a3):
        """Test the row margins of an SDD matrix."""
        np.testing.assert_allclose(varah_margins(a3), [5.6, 2.1, 1.4, 0.7], atol=1e-12)
        assert is_sdd(a3)

    def test_profile_to_dict(self, a5):
        """Test the JSON-friendly form of a profile."""
        data = profile(a5).to_dict()

        assert data["n"] == 3
        assert data["is_nekrasov"] is True
        assert data["is_sdd"] is False
        assert len(data["h"]) == 3


class TestFixtureClassification:
    """Tests that every built-in matrix has its documented structure."""

    def test_all_fixtures_nekrasov(self, fixtures):
        """Test that every table matrix passes the Nekrasov test."""
        for name in fixtures.names:
            assert profile(fixtures.get(name)).is_nekrasov, name

    def test_documented_classes(self, fixtures):
        """Test a few documented classifications."""
        assert profile(fixtures.get("A3")).is_sdd
        assert not profile(fixtures.get("A5")).is_sdd
        assert profile(fixtures.get("AH6")).is_nekrasov
