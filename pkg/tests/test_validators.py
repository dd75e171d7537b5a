"""
Unit tests for validation and logging utilities.
"""

import logging

import pytest

from nekscale.utils.logging import RunLogger, get_logger, resolve_level
from nekscale.utils.validators import ValidationError, run_value_checks, validate_config


class TestValidateConfig:
    """Tests for validate_config."""

    def test_all_present(self):
        """Test a config with every required field."""
        config = {"scaling": {"t": 0.5}, "sweep": {"grid_size": 10}}

        assert validate_config(config, ["scaling.t", "sweep.grid_size"]) is True

    def test_missing_nested(self):
        """Test that missing nested fields are listed."""
        with pytest.raises(ValidationError) as exc_info:
            validate_config({"scaling": {}}, ["scaling.t", "report"])
        assert "scaling.t" in str(exc_info.value)
        assert "report" in str(exc_info.value)


class TestRunValueChecks:
    """Tests for run_value_checks."""

    @pytest.mark.parametrize("check,passed", [
        ({"type": "abs", "computed": 1.0004, "expected": 1.0, "tolerance": 5e-4}, True),
        ({"type": "abs", "computed": 1.001, "expected": 1.0, "tolerance": 5e-4}, False),
        ({"type": "rel", "computed": 2.0 * (1 + 1e-12), "expected": 2.0, "tolerance": 1e-9}, True),
        ({"type": "rel", "computed": 2.1, "expected": 2.0, "tolerance": 1e-9}, False),
        ({"type": "at_most", "computed": 0.9, "expected": 1.0}, True),
        ({"type": "at_most", "computed": 1.1, "expected": 1.0}, False),
        ({"type": "at_least", "computed": 1.1, "expected": 1.0}, True),
        ({"type": "at_least", "computed": 0.9, "expected": 1.0}, False),
        ({"type": "sweep", "computed": 1.2, "expected": 1.25, "floor": 1.0, "tolerance": 5e-3}, True),
        ({"type": "sweep", "computed": 1.3, "expected": 1.25, "floor": 1.0, "tolerance": 5e-3}, False),
        ({"type": "sweep", "computed": 0.9, "expected": 1.25, "floor": 1.0, "tolerance": 5e-3}, False),
    ])
    def test_check_types(self, check, passed):
        """Test the pass or fail outcome of each check type."""
        results = run_value_checks([check])

        assert results["checks"][0]["passed"] is passed
        assert results["passed"] == int(passed)
        assert results["failed"] == int(not passed)

    def test_reported_never_fails(self):
        """Test that reported rows are counted apart and never fail."""
        results = run_value_checks([
            {"name": "full", "type": "reported", "computed": float("nan"), "expected": 3.0},
        ])

        assert results["reported"] == 1
        assert results["failed"] == 0
        assert results["checks"][0]["message"] == "reported-only"

    @pytest.mark.parametrize("computed", [None, float("nan"), float("inf")])
    def test_non_finite_fails(self, computed):
        """Test that a missing or non-finite value fails."""
        results = run_value_checks([{"type": "at_most", "computed": computed, "expected": 1.0}])

        assert results["failed"] == 1
        assert "not finite" in results["checks"][0]["message"]

    def test_unknown_type(self):
        """Test that an unknown check type fails."""
        results = run_value_checks([{"type": "fuzzy", "computed": 1.0, "expected": 1.0}])

        assert results["failed"] == 1
        assert "Unknown check type" in results["checks"][0]["message"]

    def test_fail_on_error(self):
        """Test that fail_on_error raises on the first failure."""
        checks = [
            {"name": "good", "type": "abs", "computed": 1.0, "expected": 1.0},
            {"name": "bad", "type": "abs", "computed": 2.0, "expected": 1.0},
        ]

        with pytest.raises(ValidationError, match="bad"):
            run_value_checks(checks, fail_on_error=True)


class TestLogging:
    """Tests for the logging helpers."""

    def test_resolve_level(self, monkeypatch):
        """Test level names, integers and the environment fallback."""
        assert resolve_level("debug") == logging.DEBUG
        assert resolve_level(logging.ERROR) == logging.ERROR
        assert resolve_level("nonsense") == logging.WARNING
        monkeypatch.setenv("NEKSCALE_LOG_LEVEL", "INFO")
        assert resolve_level() == logging.INFO

    def test_logger_is_configured_once(self):
        """Test that repeated calls do not stack handlers."""
        first = get_logger("nekscale.tests.once")
        second = get_logger("nekscale.tests.once")

        assert first is second
        assert len(second.handlers) == 1

    def test_run_logger_prefix(self, mocker):
        """Test that messages carry the command and run id."""
        run_logger = RunLogger("bound", run_id="r1")
        info = mocker.patch.object(run_logger._logger, "info")

        run_logger.info("done")

        info.assert_called_once_with("[bound][r1] done")

    def test_log_metrics(self, mocker):
        """Test the metrics line."""
        run_logger = RunLogger("repro", run_id="r2")
        info = mocker.patch.object(run_logger._logger, "info")

        run_logger.log_metrics({"passed": 3, "failed": 0})

        info.assert_called_once_with("[repro][r2] Metrics: passed=3, failed=0")

    def test_generated_run_id(self):
        """Test that a run id is generated when none is given."""
        assert RunLogger("check").run_id
