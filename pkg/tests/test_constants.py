"""
Constants Tests
---------------
Tests for the shared numeric tables.
"""

import math

import pytest

from wwbirkhoff.constants import CUBIC_PHASE_BOUND, TOLERANCES, validate_constants


class TestConstants:
    """Tests for constant tables."""

    def test_validate(self):
        """The shipped tables are consistent."""
        assert validate_constants() is True

    def test_tolerances_immutable(self):
        """TOLERANCES cannot be modified at runtime."""
        with pytest.raises(TypeError):
            TOLERANCES["identity"] = 1.0

    def test_cubic_bound(self):
        """2 / (2 + √2) = 2 - √2."""
        assert CUBIC_PHASE_BOUND == pytest.approx(2.0 - math.sqrt(2.0), abs=1e-15)
