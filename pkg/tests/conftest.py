"""
wwbirkhoff Test Fixtures
------------------------
Shared fixtures for all tests.
"""

import pytest

from wwbirkhoff import (
    RealPair,
    SpectralField,
    build_hamiltonian,
    random_initial_datum,
)


@pytest.fixture
def cos_pair():
    """η = cos 2x, ψ = cos x at truncation 3."""
    return RealPair(
        SpectralField.trigonometric(3, cos={2: 1.0}),
        SpectralField.trigonometric(3, cos={1: 1.0}),
    )


@pytest.fixture
def random_pair():
    """A small random real pair at truncation 3."""
    return RealPair(
        SpectralField.random(3, seed=11, decay=0.5).scale(0.1),
        SpectralField.random(3, seed=12, decay=0.5).scale(0.1),
    )


@pytest.fixture
def h2_small():
    """Quadratic Hamiltonian at truncation 4."""
    return build_hamiltonian(4, 2)


@pytest.fixture
def h3_small():
    """Cubic Hamiltonian at truncation 3."""
    return build_hamiltonian(3, 3)


@pytest.fixture
def small_datum():
    """Random complex datum, M=4, ||u||_{L²} = 0.05."""
    return random_initial_datum(4, 0.05, 0.0, seed=3)


@pytest.fixture
def write_config(tmp_path):
    """Write a `key = value` run file and return its path."""

    def _write(**values):
        path = tmp_path / "run.conf"
        lines = ["# test run"] + [f"{key} = {value}" for key, value in values.items()]
        path.write_text("\n".join(lines) + "\n")
        return path

    return _write
