"""
Pytest configuration and fixtures for nekscale tests.
"""

import os
from typing import Callable

import numpy as np
import pytest
import yaml

from nekscale.core.matrix import SquareMatrix
from nekscale.repro.fixtures import FixtureSet


# Keep library logging quiet and settings independent of the caller's shell
os.environ["NEKSCALE_ENV"] = "test"
os.environ.setdefault("NEKSCALE_LOG_LEVEL", "WARNING")


def _sign(rng: np.random.Generator) -> float:
    return 1.0 if rng.random() < 0.5 else -1.0


def random_nekrasov(
    rng: np.random.Generator,
    n: int,
    positive_diagonal: bool = False,
    transpose_nekrasov: bool = False,
) -> SquareMatrix:
    """
    Draw a Nekrasov matrix of order n.

    Off-diagonal entries are uniform in [-5, 5]; about a quarter of the rows
    lose their strictly-upper part so the pivot row varies. Diagonals are
    then inflated row by row past h_i, which only depends on earlier rows.
    With transpose_nekrasov the diagonal also beats the column sum, making
    the transpose SDD (hence Nekrasov).
    """
    entries = rng.uniform(-5.0, 5.0, size=(n, n))
    for i in range(n - 1):
        if rng.random() < 0.25:
            entries[i, i + 1:] = 0.0
    np.fill_diagonal(entries, 0.0)

    abs_a = np.abs(entries)
    diag = np.zeros(n)
    h = np.zeros(n)
    for i in range(n):
        h[i] = float(abs_a[i, :i] @ (h[:i] / diag[:i])) + float(abs_a[i, i + 1:].sum())
        target = h[i]
        if transpose_nekrasov:
            target = max(target, float(abs_a[:, i].sum()))
        diag[i] = target * (1.0 + rng.uniform(0.05, 1.0)) + rng.uniform(0.1, 1.0)

    signs = np.ones(n) if positive_diagonal else np.array([_sign(rng) for _ in range(n)])
    entries[np.diag_indices(n)] = signs * diag
    return SquareMatrix(entries)


def random_sdd(rng: np.random.Generator, n: int) -> SquareMatrix:
    """Draw a strictly diagonally dominant matrix of order n."""
    entries = rng.uniform(-5.0, 5.0, size=(n, n))
    np.fill_diagonal(entries, 0.0)
    row_sums = np.abs(entries).sum(axis=1)
    diag = row_sums * (1.0 + rng.uniform(0.05, 1.0, size=n)) + rng.uniform(0.1, 1.0, size=n)
    signs = np.where(rng.random(n) < 0.5, -1.0, 1.0)
    entries[np.diag_indices(n)] = signs * diag
    return SquareMatrix(entries)


@pytest.fixture
def rng():
    """Seeded random generator."""
    return np.random.default_rng(20240517)


@pytest.fixture
def nekrasov_factory() -> Callable[..., SquareMatrix]:
    """Factory for random Nekrasov matrices."""
    return random_nekrasov


@pytest.fixture
def sdd_factory() -> Callable[..., SquareMatrix]:
    """Factory for random SDD matrices."""
    return random_sdd


@pytest.fixture(scope="session")
def fixtures():
    """Built-in table matrices."""
    return FixtureSet()


@pytest.fixture
def a1(fixtures):
    return fixtures.get("A1")


@pytest.fixture
def a3(fixtures):
    return fixtures.get("A3")


@pytest.fixture
def a5(fixtures):
    return fixtures.get("A5")


@pytest.fixture
def a6(fixtures):
    return fixtures.get("A6")


@pytest.fixture
def sample_settings_dict():
    """Complete settings dictionary for config tests."""
    return {
        "oracle": {
            "pivot_tolerance": 1e-12,
            "power_tolerance": 1e-10,
            "power_max_iterations": 5000,
        },
        "scaling": {
            "t": 0.25,
            "strategy": "full",
            "placement": "interval",
        },
        "sweep": {"grid_size": 500},
        "report": {"precision": 6, "timestamp": False},
        "repro": {
            "tolerance": 5e-4,
            "sweep_tolerance": 5e-3,
            "oracle_tolerance": 1e-3,
            "relative_tolerance": 1e-9,
        },
        "lcp": {"max_enumeration_size": 8},
    }


@pytest.fixture
def temp_config_file(tmp_path, sample_settings_dict):
    """Create a temporary settings file."""
    config_file = tmp_path / "settings.yaml"
    with open(config_file, "w") as f:
        yaml.dump(sample_settings_dict, f)
    return config_file


@pytest.fixture
def a5_csv(tmp_path):
    """A5 written as CSV."""
    path = tmp_path / "a5.csv"
    path.write_text("6,-3,-2\n-1,11,-8\n-7,-3,10\n")
    return path
