"""
Unit tests for epsilon plans and scaling matrices.
"""

import numpy as np
import pytest

from nekscale.core.matrix import (
    DimensionMismatchError,
    MatrixError,
    SquareMatrix,
    is_sdd,
    profile,
)
from nekscale.core.scaling import (
    EpsilonPlan,
    InvalidPlanError,
    NotNekrasovError,
    ParameterRangeError,
    Placement,
    ScalingMatrix,
    Strategy,
    apply_scaling,
    build_scaling,
    epsilon_grid,
    epsilon_plan,
    explicit_plan,
    find_pivot_k,
    full_epsilon_plan,
    pivot_epsilon_plan,
    validate_plan,
)
from nekscale.repro.fixtures import eps_family, lcp_family, lcp_published_eps


def _rules(check, row=None):
    return [v.rule for v in check.violations if row is None or v.row == row]


class TestFindPivot:
    """Tests for find_pivot_k."""

    def test_dense_upper_part(self, a1):
        """Test a matrix whose rows 1..n-1 all reach right of the diagonal."""
        assert find_pivot_k(a1) == 4

    @pytest.mark.parametrize("K", [3, 10, 100])
    def test_lcp_family(self, K):
        """Test a family with a zero right of the second diagonal entry."""
        assert find_pivot_k(lcp_family(K)) == 2

    def test_identity(self):
        """Test that the first row already qualifies."""
        assert find_pivot_k(SquareMatrix.identity(3)) == 1


class TestPivotPlan:
    """Tests for plans with free epsilons from the pivot row on."""

    def test_identity(self):
        """Test the plan of the identity."""
        plan = pivot_epsilon_plan(SquareMatrix.identity(3), t=0.5)

        assert plan.k == 1
        assert plan.strategy is Strategy.PIVOT
        np.testing.assert_array_equal(plan.eps, [0.5, 0.5, 0.5])

    def test_single_free_row(self, a1):
        """Test that only the last entry is free when k = n."""
        plan = pivot_epsilon_plan(a1, t=0.5)
        delta = profile(a1).delta

        assert plan.k == 4
        np.testing.assert_array_equal(plan.eps[:3], [0.0, 0.0, 0.0])
        assert plan.eps[3] == pytest.approx(delta[3] / 2)
        assert plan.eps[3] == pytest.approx(5.264123 / 2, abs=1e-6)

    def test_lcp_family_delta_placement(self):
        """Test the default placement on the K = 3 family member."""
        plan = pivot_epsilon_plan(lcp_family(3), t=0.5)

        np.testing.assert_allclose(plan.eps, [0.0, 0.5, 7.0 / 18.0], rtol=1e-12)
        assert validate_plan(lcp_family(3), plan).valid

    @pytest.mark.parametrize("K", [3.0, 10.0, 100.0])
    def test_interval_placement_reproduces_published_vector(self, K):
        """Test that interval midpoints give (0, 1/2, (2K^2 - 2K + 3) / (4K^2))."""
        plan = pivot_epsilon_plan(lcp_family(K), t=0.5, placement=Placement.INTERVAL)

        np.testing.assert_allclose(plan.eps, lcp_published_eps(K), rtol=1e-12, atol=1e-15)
        assert plan.placement is Placement.INTERVAL

    def test_lcp_family_k10_valid(self):
        """Test the free inequality on the K = 10 family member."""
        A = lcp_family(10)
        plan = pivot_epsilon_plan(A, t=0.5)

        assert plan.k == 2
        assert plan.eps[2] > abs(A.entries[2, 1]) * plan.eps[1] / abs(A.entries[1, 1])
        assert validate_plan(A, plan).valid

    @pytest.mark.parametrize("t", [0.0, 1.0, -0.1, 1.5])
    def test_t_out_of_range(self, a1, t):
        """Test that t must lie strictly inside (0, 1)."""
        with pytest.raises(ParameterRangeError):
            pivot_epsilon_plan(a1, t=t)

    def test_not_nekrasov(self):
        """Test that plans require a Nekrasov matrix."""
        A = SquareMatrix.from_rows([[4, 1, 1], [1, 4, 1], [3, 3, 1]])

        with pytest.raises(NotNekrasovError) as exc_info:
            pivot_epsilon_plan(A)
        assert exc_info.value.row == 3

    def test_unknown_strategy(self, a1):
        """Test error for a strategy name that does not exist."""
        with pytest.raises(ParameterRangeError):
            epsilon_plan(a1, strategy="optimal")

    @pytest.mark.parametrize("name,strategy", [("t21", Strategy.FULL), ("t22", Strategy.PIVOT)])
    def test_published_strategy_names(self, a1, name, strategy):
        """Test that the published strategy names select the same plan."""
        plan = epsilon_plan(a1, strategy=name)

        assert plan.strategy is strategy
        assert np.array_equal(plan.eps, epsilon_plan(a1, strategy=strategy).eps)


class TestFullPlan:
    """Tests for plans with a free epsilon on every row."""

    def test_identity(self):
        """Test the plan of the 2x2 identity."""
        plan = full_epsilon_plan(SquareMatrix.identity(2), t=0.5)

        assert plan.k == 1
        np.testing.assert_array_equal(plan.eps, [0.5, 0.5])

    def test_rescaling(self):
        """Test that earlier epsilons shrink when w_i reaches eps_i."""
        A = SquareMatrix.from_rows([[1, 0.5], [10, 10]])
        plan = full_epsilon_plan(A, t=0.5)

        # t * delta = (0.25, 2.5) and w_2 = 2.5, so eps_1 is halved
        np.testing.assert_allclose(plan.eps, [0.125, 2.5], rtol=1e-12)
        assert validate_plan(A, plan).valid

    def test_a6_valid(self, a6):
        """Test a matrix with a large entry below the first diagonal entry."""
        plan = full_epsilon_plan(a6, t=0.5)

        assert validate_plan(a6, plan).valid
        assert is_sdd(apply_scaling(a6, build_scaling(a6, plan)))

    def test_a5_large_t(self, a5):
        """Test a valid plan and an SDD result at t = 0.9."""
        plan = full_epsilon_plan(a5, t=0.9)

        assert validate_plan(a5, plan).valid
        assert is_sdd(apply_scaling(a5, build_scaling(a5, plan)))

    def test_first_epsilon_capped(self, fixtures):
        """Test that eps_1 never exceeds delta_1, keeping ||S|| <= 1."""
        for A in fixtures.matrices.values():
            plan = full_epsilon_plan(A, t=0.9)
            assert plan.eps[0] <= profile(A).delta[0]
            assert build_scaling(A, plan).norm <= 1.0


class TestEpsilonGrid:
    """Tests for the batched plan builder."""

    def test_matches_single_plans(self, a6):
        """Test that each grid row equals the single-t plan."""
        ts = [0.1, 0.5, 0.9]
        k, eps = epsilon_grid(a6, ts, Strategy.FULL)

        assert k == 1
        assert eps.shape == (3, 4)
        for row, t in zip(eps, ts):
            np.testing.assert_allclose(row, full_epsilon_plan(a6, t=t).eps, rtol=1e-14)

    def test_rejects_bad_t_anywhere(self, a1):
        """Test that one bad value fails the whole grid."""
        with pytest.raises(ParameterRangeError):
            epsilon_grid(a1, [0.2, 1.0])


class TestValidatePlan:
    """Tests for validate_plan."""

    def test_generated_plans_are_valid(self, fixtures):
        """Test every generated plan on every table matrix."""
        for A in fixtures.matrices.values():
            for strategy in Strategy:
                check = validate_plan(A, epsilon_plan(A, strategy, 0.5))
                assert check.valid, check.violations
                assert bool(check)

    def test_epsilon_above_slack(self, a1):
        """Test that eps_n = 2 delta_n breaks eps < delta at row 4."""
        delta = profile(a1).delta
        plan = explicit_plan(a1, [0, 0, 0, 2 * delta[3]])

        check = validate_plan(a1, plan)

        assert not check.valid
        assert _rules(check, row=4) == ["eps < delta"]

    def test_small_second_epsilon(self, a6):
        """Test that a tiny eps_2 fails the w inequality at row 2."""
        delta = profile(a6).delta
        plan = explicit_plan(a6, [delta[0] / 2, 1e-9, 1e-9, 1e-9], Strategy.FULL)

        check = validate_plan(a6, plan)

        assert not check.valid
        assert check.violations[0].row == 2
        assert check.violations[0].rule == "eps > w"

    def test_nonzero_before_pivot(self, a1):
        """Test that pivot plans need zeros before row k."""
        delta = profile(a1).delta
        plan = explicit_plan(a1, [0.1, 0, 0, delta[3] / 2])

        assert _rules(validate_plan(a1, plan), row=1) == ["eps == 0"]

    def test_full_strategy_allows_slack(self):
        """Test that the full strategy accepts eps_i = delta_i."""
        A = SquareMatrix.identity(2)

        assert validate_plan(A, explicit_plan(A, [1.0, 1.0], Strategy.FULL)).valid
        assert not validate_plan(A, explicit_plan(A, [1.0, 1.0], Strategy.PIVOT)).valid

    def test_full_strategy_above_slack(self):
        """Test the non-strict cap of the full strategy."""
        A = SquareMatrix.identity(2)
        check = validate_plan(A, explicit_plan(A, [0.5, 1.5], Strategy.FULL))

        assert _rules(check, row=2) == ["eps <= delta"]

    def test_nonpositive_free_epsilon(self):
        """Test that free epsilons must be positive."""
        A = SquareMatrix.identity(2)
        check = validate_plan(A, explicit_plan(A, [0.5, 0.0], Strategy.FULL))

        assert "eps > 0" in _rules(check, row=2)

    def test_wrong_pivot(self, a1):
        """Test that a plan with the wrong k is reported."""
        plan = EpsilonPlan(strategy=Strategy.PIVOT, k=1, eps=[0, 0, 0, 1.0])

        check = validate_plan(a1, plan)

        assert any(v.rule == "pivot" and v.row is None for v in check.violations)

    def test_length_mismatch(self, a1):
        """Test a plan of the wrong length."""
        plan = EpsilonPlan(strategy=Strategy.PIVOT, k=4, eps=[0.1, 0.2])

        check = validate_plan(a1, plan)

        assert _rules(check) == ["length"]

    def test_zero_diagonal_is_reported(self):
        """Test that validation reports rather than raises on a zero diagonal."""
        A = SquareMatrix.from_rows([[1, 0], [1, 0]])
        plan = EpsilonPlan(strategy=Strategy.FULL, k=1, eps=[0.5, 0.5])

        check = validate_plan(A, plan)

        assert not check.valid
        assert check.violations[0].rule == "nonzero diagonal"
        assert check.violations[0].row == 2


class TestBuildScaling:
    """Tests for build_scaling and apply_scaling."""

    def test_identity(self):
        """Test the scaling of the identity."""
        A = SquareMatrix.identity(3)
        S = build_scaling(A, pivot_epsilon_plan(A, t=0.5))

        np.testing.assert_array_equal(S.s, [0.5, 0.5, 0.5])
        assert S.norm == 0.5

    def test_single_free_row(self, a1):
        """Test s_i = h_i / |a_ii| before the pivot and the shifted last entry."""
        prof = profile(a1)
        plan = pivot_epsilon_plan(a1, t=0.5)
        S = build_scaling(a1, plan)

        expected = prof.h / a1.abs_diagonal
        expected[3] = (prof.h[3] + prof.delta[3] / 2) / 6.0
        np.testing.assert_allclose(S.s, expected, rtol=1e-12)

    def test_eps_family(self):
        """Test the first two scaling entries of the one-parameter family."""
        eps = 0.05
        S = build_scaling(eps_family(eps), pivot_epsilon_plan(eps_family(eps), t=0.5))

        assert S.s[0] == pytest.approx(0.75)
        assert S.s[1] == pytest.approx(1 - 3 * eps / 8)

    def test_invalid_plan(self, a1):
        """Test that build_scaling refuses an invalid plan."""
        delta = profile(a1).delta
        plan = explicit_plan(a1, [0, 0, 0, 2 * delta[3]])

        with pytest.raises(InvalidPlanError) as exc_info:
            build_scaling(a1, plan)
        assert exc_info.value.violations[0].row == 4
        assert "row 4" in str(exc_info.value)

    def test_apply_scaling(self):
        """Test right scaling of a 2x2 matrix."""
        A = SquareMatrix.from_rows([[2, 1], [0, 2]])

        result = apply_scaling(A, ScalingMatrix([0.5, 1.0]))

        assert result.to_rows() == [[1.0, 1.0], [0.0, 2.0]]

    def test_apply_unit_scaling(self, a5):
        """Test that the unit scaling changes nothing."""
        assert apply_scaling(a5, ScalingMatrix(np.ones(3))) == a5

    def test_apply_dimension_mismatch(self, a5):
        """Test error for a scaling of the wrong size."""
        with pytest.raises(DimensionMismatchError):
            apply_scaling(a5, ScalingMatrix([1.0, 1.0]))

    @pytest.mark.parametrize("s", [[1.0, 0.0], [1.0, -2.0], [np.inf, 1.0]])
    def test_scaling_must_be_positive(self, s):
        """Test that scaling entries are finite and positive."""
        with pytest.raises(MatrixError):
            ScalingMatrix(s)

    def test_scaled_matrix_is_sdd(self, fixtures):
        """Test that every generated scaling certifies every table matrix."""
        for A in fixtures.matrices.values():
            for strategy in Strategy:
                for t in (0.1, 0.5, 0.9):
                    S = build_scaling(A, epsilon_plan(A, strategy, t))
                    assert is_sdd(apply_scaling(A, S))
                    assert np.all(S.s > 0) and np.all(S.s <= 1.0)

    def test_plan_to_dict(self, a1):
        """Test the JSON-friendly form of a plan."""
        data = pivot_epsilon_plan(a1, t=0.5).to_dict()

        assert data["strategy"] == "pivot"
        assert data["k"] == 4
        assert data["t"] == 0.5
        assert data["placement"] == "delta"
