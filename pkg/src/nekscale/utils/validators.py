"""
Validation utilities for configuration and numeric checks.

Provides configuration validation and a runner for the numeric
comparisons used by the reproduction harness.
"""

from __future__ import annotations

import math
from typing import Any, Dict, List, Optional

from nekscale.utils.logging import get_logger


logger = get_logger(__name__)


class ValidationError(Exception):
    """Raised when validation fails."""
    pass


CHECK_TYPES = ("abs", "rel", "at_most", "at_least", "sweep", "reported")


def validate_config(config: Dict[str, Any], required_fields: List[str]) -> bool:
    """
    Validate configuration has required fields.

    Args:
        config: Configuration dictionary
        required_fields: List of required field names (supports dot notation)

    Returns:
        True if valid

    Raises:
        ValidationError: If validation fails
    """
    missing = []

    for field in required_fields:
        parts = field.split(".")
        value = config

        for part in parts:
            if isinstance(value, dict) and part in value:
                value = value[part]
            else:
                missing.append(field)
                break

    if missing:
        raise ValidationError(f"Missing required fields: {missing}")

    return True


def _evaluate(check: Dict[str, Any]) -> Dict[str, Any]:
    """Evaluate a single numeric check and return its result record."""
    check_type = check.get("type", "abs")
    computed = check.get("computed")
    expected = check.get("expected")
    tolerance = float(check.get("tolerance", 0.0))

    result = {
        "name": check.get("name", check_type),
        "type": check_type,
        "computed": computed,
        "expected": expected,
        "tolerance": tolerance,
        "delta": None,
        "passed": False,
        "message": "",
    }

    if check_type == "reported":
        result["passed"] = True
        result["message"] = "reported-only"
        if computed is not None and expected is not None and math.isfinite(computed):
            result["delta"] = abs(computed - expected)
        return result

    if computed is None or not math.isfinite(computed):
        result["message"] = f"computed value is not finite: {computed}"
        return result

    if check_type == "abs":
        delta = abs(computed - expected)
        result["delta"] = delta
        result["passed"] = delta <= tolerance
        result["message"] = f"|computed - expected| = {delta:.3e} (tolerance {tolerance:.1e})"

    elif check_type == "rel":
        delta = abs(computed - expected) / max(abs(expected), 1e-300)
        result["delta"] = delta
        result["passed"] = delta <= tolerance
        result["message"] = f"relative delta {delta:.3e} (tolerance {tolerance:.1e})"

    elif check_type == "at_most":
        delta = computed - expected
        result["delta"] = delta
        result["passed"] = delta <= tolerance
        result["message"] = f"computed - limit = {delta:.3e}"

    elif check_type == "at_least":
        delta = computed - expected
        result["delta"] = delta
        result["passed"] = delta >= -tolerance
        result["message"] = f"computed - limit = {delta:.3e}"

    elif check_type == "sweep":
        floor: Optional[float] = check.get("floor")
        delta = computed - expected
        result["delta"] = delta
        above_floor = floor is None or computed >= floor * (1.0 - 1e-12)
        result["passed"] = delta <= tolerance and above_floor
        result["message"] = (
            f"computed - reported = {delta:.3e} (allowance {tolerance:.1e}), "
            f"floor {'ok' if above_floor else 'violated'}"
        )

    else:
        result["message"] = f"Unknown check type: {check_type}"

    return result


def run_value_checks(
    checks: List[Dict[str, Any]],
    fail_on_error: bool = False
) -> Dict[str, Any]:
    """
    Run numeric comparison checks.

    Supported check types:
    - abs: |computed - expected| <= tolerance
    - rel: |computed - expected| / |expected| <= tolerance
    - at_most: computed <= expected + tolerance
    - at_least: computed >= expected - tolerance
    - sweep: computed <= expected + tolerance and computed >= floor
    - reported: displayed only, never fails

    Args:
        checks: List of check dictionaries
        fail_on_error: Raise exception on first failure

    Returns:
        Dictionary with check results
    """
    results: Dict[str, Any] = {
        "passed": 0,
        "failed": 0,
        "reported": 0,
        "checks": [],
    }

    for check in checks:
        check_result = _evaluate(check)

        if check_result["type"] == "reported":
            results["reported"] += 1
        elif check_result["passed"]:
            results["passed"] += 1
        else:
            results["failed"] += 1
            if fail_on_error:
                raise ValidationError(
                    f"Check failed: {check_result['name']} - {check_result['message']}"
                )

        results["checks"].append(check_result)
        logger.debug(
            f"Check '{check_result['name']}': "
            f"{'PASSED' if check_result['passed'] else 'FAILED'} ({check_result['message']})"
        )

    return results
