"""Built-in fixtures and the reproduction harness."""

from nekscale.repro.fixtures import PUBLISHED_VALUES, FixtureSet, eps_family, lcp_family
from nekscale.repro.harness import (
    REPRO_TARGETS,
    ComparisonRow,
    ReportDocument,
    ReproError,
    ReproRunner,
)

__all__ = [
    "PUBLISHED_VALUES",
    "FixtureSet",
    "eps_family",
    "lcp_family",
    "REPRO_TARGETS",
    "ComparisonRow",
    "ReportDocument",
    "ReproError",
    "ReproRunner",
]
