"""
Configuration management for nekscale.

Supports YAML-based settings with environment variable substitution,
validation, and hierarchical merging of override files.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml

from nekscale.utils.validators import ValidationError, validate_config


DEFAULTS_PATH = Path(__file__).resolve().parent.parent / "configs" / "defaults.yaml"
ENVIRONMENT_VAR = "NEKSCALE_ENV"

REQUIRED_SECTIONS = ["oracle", "scaling", "sweep", "report", "repro", "lcp"]


class ConfigurationError(Exception):
    """Raised when configuration is invalid or cannot be loaded."""
    pass


def _as_float(section: str, name: str, value: Any) -> float:
    try:
        return float(value)
    except (TypeError, ValueError) as e:
        raise ConfigurationError(f"{section}.{name} must be a number, got {value!r}") from e


def _as_int(section: str, name: str, value: Any) -> int:
    try:
        return int(value)
    except (TypeError, ValueError) as e:
        raise ConfigurationError(f"{section}.{name} must be an integer, got {value!r}") from e


def _as_bool(value: Any) -> bool:
    if isinstance(value, str):
        return value.strip().lower() in ("1", "true", "yes", "on")
    return bool(value)


@dataclass
class OracleConfig:
    """Settings for the elimination and power-iteration oracles."""
    pivot_tolerance: float = 1e-12  # relative to max |a_ij|
    power_tolerance: float = 1e-10
    power_max_iterations: int = 10_000

    def __post_init__(self):
        self.pivot_tolerance = _as_float("oracle", "pivot_tolerance", self.pivot_tolerance)
        self.power_tolerance = _as_float("oracle", "power_tolerance", self.power_tolerance)
        self.power_max_iterations = _as_int(
            "oracle", "power_max_iterations", self.power_max_iterations
        )
        if self.pivot_tolerance < 0:
            raise ConfigurationError("oracle.pivot_tolerance must be non-negative")
        if self.power_tolerance <= 0:
            raise ConfigurationError("oracle.power_tolerance must be positive")
        if self.power_max_iterations < 1:
            raise ConfigurationError("oracle.power_max_iterations must be at least 1")


_STRATEGY_NAMES = {"pivot": "pivot", "full": "full", "t22": "pivot", "t21": "full"}


@dataclass
class ScalingConfig:
    """Default parameters for building epsilon plans."""
    t: float = 0.5
    strategy: str = "pivot"  # pivot (t22), full (t21)
    placement: str = "delta"  # delta, interval

    def __post_init__(self):
        self.t = _as_float("scaling", "t", self.t)
        if not 0.0 < self.t < 1.0:
            raise ConfigurationError(f"scaling.t must lie in (0, 1), got {self.t}")
        if self.strategy not in _STRATEGY_NAMES:
            raise ConfigurationError(
                f"Invalid scaling.strategy: {self.strategy}. Must be pivot, full, t22 or t21"
            )
        self.strategy = _STRATEGY_NAMES[self.strategy]
        if self.placement not in ("delta", "interval"):
            raise ConfigurationError(
                f"Invalid scaling.placement: {self.placement}. Must be delta or interval"
            )


@dataclass
class SweepConfig:
    """Settings for the scalar t sweep."""
    grid_size: int = 10_000

    def __post_init__(self):
        self.grid_size = _as_int("sweep", "grid_size", self.grid_size)
        if self.grid_size < 2:
            raise ConfigurationError("sweep.grid_size must be at least 2")


@dataclass
class ReportConfig:
    """Settings for rendering reports."""
    precision: int = 4
    timestamp: bool = True

    def __post_init__(self):
        self.precision = _as_int("report", "precision", self.precision)
        self.timestamp = _as_bool(self.timestamp)
        if not 0 <= self.precision <= 17:
            raise ConfigurationError("report.precision must lie in [0, 17]")


@dataclass
class ReproConfig:
    """Tolerances used when comparing against reported values."""
    tolerance: float = 5e-4
    sweep_tolerance: float = 5e-3
    oracle_tolerance: float = 1e-3
    relative_tolerance: float = 1e-9

    def __post_init__(self):
        for name in ("tolerance", "sweep_tolerance", "oracle_tolerance", "relative_tolerance"):
            value = _as_float("repro", name, getattr(self, name))
            if value < 0:
                raise ConfigurationError(f"repro.{name} must be non-negative")
            setattr(self, name, value)


@dataclass
class LcpConfig:
    """Settings for the complementarity tools."""
    max_enumeration_size: int = 12

    def __post_init__(self):
        self.max_enumeration_size = _as_int(
            "lcp", "max_enumeration_size", self.max_enumeration_size
        )
        if not 1 <= self.max_enumeration_size <= 20:
            raise ConfigurationError("lcp.max_enumeration_size must lie in [1, 20]")


@dataclass
class Settings:
    """Complete nekscale settings."""
    oracle: OracleConfig = field(default_factory=OracleConfig)
    scaling: ScalingConfig = field(default_factory=ScalingConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    report: ReportConfig = field(default_factory=ReportConfig)
    repro: ReproConfig = field(default_factory=ReproConfig)
    lcp: LcpConfig = field(default_factory=LcpConfig)
    environment: str = "local"

    def to_dict(self) -> Dict[str, Any]:
        """Convert settings to a plain dictionary."""
        return {
            "environment": self.environment,
            "oracle": vars(self.oracle).copy(),
            "scaling": vars(self.scaling).copy(),
            "sweep": vars(self.sweep).copy(),
            "report": vars(self.report).copy(),
            "repro": vars(self.repro).copy(),
            "lcp": vars(self.lcp).copy(),
        }


class ConfigLoader:
    """
    Load and parse YAML settings files with environment variable substitution.

    Supports:
    - ${ENV_VAR} syntax for environment variables
    - ${ENV_VAR:default} syntax for defaults
    - Hierarchical merging: packaged defaults, user file, environment override
    - <stem>.<environment>.yaml overrides found next to a settings file
    """

    ENV_PATTERN = re.compile(r'\$\{([^}:]+)(?::([^}]*))?\}')

    def __init__(
        self,
        base_path: Optional[Union[str, Path]] = None,
        environment: Optional[str] = None,
        overrides: Optional[Dict[str, str]] = None
    ):
        """
        Initialize configuration loader.

        Args:
            base_path: Base path for relative settings files
            environment: Environment name used to find override files
            overrides: Variables taking precedence over the process environment
        """
        self.base_path = Path(base_path) if base_path else Path.cwd()
        self.environment = environment or os.getenv(ENVIRONMENT_VAR, "local")
        self.overrides = overrides or {}

    def _substitute_variables(self, value: Any) -> Any:
        """
        Substitute environment variables and overrides in value.

        Args:
            value: Value to process (string, dict, or list)

        Returns:
            Value with variables substituted
        """
        if isinstance(value, str):
            def replace_match(match):
                var_name = match.group(1)
                default_value = match.group(2)

                if var_name in self.overrides:
                    return self.overrides[var_name]

                env_value = os.getenv(var_name)
                if env_value is not None:
                    return env_value
                elif default_value is not None:
                    return default_value
                else:
                    raise ConfigurationError(
                        f"Environment variable '{var_name}' not found and no default provided"
                    )

            return self.ENV_PATTERN.sub(replace_match, value)

        elif isinstance(value, dict):
            return {k: self._substitute_variables(v) for k, v in value.items()}

        elif isinstance(value, list):
            return [self._substitute_variables(item) for item in value]

        return value

    def _merge_configs(self, base: Dict, override: Dict) -> Dict:
        """
        Deep merge two configuration dictionaries.

        Args:
            base: Base configuration
            override: Override configuration

        Returns:
            Merged configuration
        """
        result = base.copy()

        for key, value in override.items():
            if key in result and isinstance(result[key], dict) and isinstance(value, dict):
                result[key] = self._merge_configs(result[key], value)
            else:
                result[key] = value

        return result

    def load_yaml(self, file_path: Union[str, Path]) -> Dict[str, Any]:
        """
        Load a YAML file with variable substitution.

        Args:
            file_path: Path to YAML file (relative or absolute)

        Returns:
            Parsed and substituted configuration dictionary
        """
        path = Path(file_path)
        if not path.is_absolute():
            path = self.base_path / path

        if not path.exists():
            raise ConfigurationError(f"Configuration file not found: {path}")

        try:
            with open(path, 'r') as f:
                config = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigurationError(f"Invalid YAML in {path}: {e}") from e

        if config is None:
            config = {}
        if not isinstance(config, dict):
            raise ConfigurationError(f"Top level of {path} must be a mapping")

        return self._substitute_variables(config)

    def _with_environment_override(self, path: Path, config: Dict[str, Any]) -> Dict[str, Any]:
        """Merge <stem>.<environment>.yaml into config when it exists."""
        if not path.is_absolute():
            path = self.base_path / path
        env_file = path.parent / f"{path.stem}.{self.environment}.yaml"
        if env_file.exists():
            config = self._merge_configs(config, self.load_yaml(env_file))
        return config

    def load_settings(
        self,
        config_path: Optional[Union[str, Path]] = None,
        env_override_path: Optional[Union[str, Path]] = None
    ) -> Settings:
        """
        Load settings: packaged defaults, then the user file, then overrides.

        Args:
            config_path: Optional user settings file
            env_override_path: Optional explicit override file

        Returns:
            Validated Settings object
        """
        config = self.load_yaml(DEFAULTS_PATH)
        config = self._with_environment_override(DEFAULTS_PATH, config)

        if config_path:
            config = self._merge_configs(config, self.load_yaml(config_path))
            config = self._with_environment_override(Path(config_path), config)

        if env_override_path:
            config = self._merge_configs(config, self.load_yaml(env_override_path))

        return self._dict_to_settings(config)

    def _dict_to_settings(self, config: Dict[str, Any]) -> Settings:
        """
        Convert dictionary to the Settings dataclass.

        Args:
            config: Configuration dictionary

        Returns:
            Settings instance
        """
        try:
            validate_config(config, REQUIRED_SECTIONS)
        except ValidationError as e:
            raise ConfigurationError(str(e)) from e

        try:
            return Settings(
                oracle=OracleConfig(**config["oracle"]),
                scaling=ScalingConfig(**config["scaling"]),
                sweep=SweepConfig(**config["sweep"]),
                report=ReportConfig(**config["report"]),
                repro=ReproConfig(**config["repro"]),
                lcp=LcpConfig(**config["lcp"]),
                environment=self.environment,
            )
        except TypeError as e:
            raise ConfigurationError(f"Unknown or malformed setting: {e}") from e
