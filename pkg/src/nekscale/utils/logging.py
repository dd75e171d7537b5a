"""
Logging utilities for consistent logging across the library.

Provides a configured logger that writes to stderr, so that command
output on stdout stays machine-readable.
"""

from __future__ import annotations

import logging
import os
import sys
from typing import Any, Dict, Optional, Union


# Default format
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

LEVEL_ENV_VAR = "NEKSCALE_LOG_LEVEL"


def resolve_level(level: Optional[Union[int, str]] = None) -> int:
    """
    Resolve a logging level from an int, a level name, or the environment.

    Args:
        level: Explicit level; falls back to NEKSCALE_LOG_LEVEL, then WARNING

    Returns:
        Numeric logging level
    """
    if level is None:
        level = os.getenv(LEVEL_ENV_VAR, "WARNING")
    if isinstance(level, int):
        return level
    resolved = logging.getLevelName(str(level).upper())
    return resolved if isinstance(resolved, int) else logging.WARNING


def get_logger(
    name: str,
    level: Optional[Union[int, str]] = None,
    format_string: Optional[str] = None
) -> logging.Logger:
    """
    Get a configured logger instance.

    Args:
        name: Logger name (typically __name__)
        level: Logging level (defaults to NEKSCALE_LOG_LEVEL or WARNING)
        format_string: Custom format string

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger(name)

    # Only configure if no handlers exist
    if not logger.handlers:
        resolved = resolve_level(level)
        logger.setLevel(resolved)

        handler = logging.StreamHandler(sys.stderr)
        handler.setLevel(resolved)

        formatter = logging.Formatter(
            format_string or LOG_FORMAT,
            datefmt=DATE_FORMAT
        )
        handler.setFormatter(formatter)

        logger.addHandler(handler)
        logger.propagate = False

    return logger


def set_level(level: Union[int, str]) -> None:
    """
    Change the level of every nekscale logger already created.

    Args:
        level: New level (int or name)
    """
    resolved = resolve_level(level)
    for name, candidate in logging.Logger.manager.loggerDict.items():
        if name.startswith("nekscale") and isinstance(candidate, logging.Logger):
            candidate.setLevel(resolved)
            for handler in candidate.handlers:
                handler.setLevel(resolved)


class RunLogger:
    """
    Context-aware logger for a single command run.

    Prefixes every message with the command name and a run identifier
    so that interleaved runs can be told apart.
    """

    def __init__(
        self,
        command: str,
        run_id: Optional[str] = None
    ):
        """
        Initialize run logger.

        Args:
            command: Name of the command being run (check, bound, repro, ...)
            run_id: Unique run identifier
        """
        self.command = command
        self.run_id = run_id or self._generate_run_id()
        self._logger = get_logger(f"nekscale.run.{command}")

    def _generate_run_id(self) -> str:
        """Generate a unique run ID."""
        from datetime import datetime
        import uuid
        return f"{datetime.now().strftime('%Y%m%d_%H%M%S')}_{uuid.uuid4().hex[:8]}"

    def _format_message(self, message: str) -> str:
        """Format message with run context."""
        return f"[{self.command}][{self.run_id}] {message}"

    def info(self, message: str, **kwargs: Any) -> None:
        """Log info message."""
        self._logger.info(self._format_message(message), **kwargs)

    def warning(self, message: str, **kwargs: Any) -> None:
        """Log warning message."""
        self._logger.warning(self._format_message(message), **kwargs)

    def error(self, message: str, **kwargs: Any) -> None:
        """Log error message."""
        self._logger.error(self._format_message(message), **kwargs)

    def debug(self, message: str, **kwargs: Any) -> None:
        """Log debug message."""
        self._logger.debug(self._format_message(message), **kwargs)

    def log_metrics(self, metrics: Dict[str, Any]) -> None:
        """Log run metrics."""
        metrics_str = ", ".join(f"{k}={v}" for k, v in metrics.items())
        self.info(f"Metrics: {metrics_str}")
