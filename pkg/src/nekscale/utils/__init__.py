"""Utility functions and helpers."""

from nekscale.utils.logging import RunLogger, get_logger
from nekscale.utils.validators import ValidationError, run_value_checks, validate_config

__all__ = [
    "get_logger",
    "RunLogger",
    "validate_config",
    "run_value_checks",
    "ValidationError",
]
