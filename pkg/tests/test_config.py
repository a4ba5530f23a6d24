"""
Configuration Tests
-------------------
Tests for the key = value run files and their schema validation.
"""

import dataclasses

import pytest

from wwbirkhoff.config import (
    CONFIG_SCHEMA,
    ConfigError,
    RunConfig,
    describe_keys,
    load_config,
    parse_config_text,
)
from wwbirkhoff.dynamics import IntegratorConfig, Scheme


class TestDefaults:
    """Tests for the default configuration."""

    def test_defaults(self):
        """Defaults match the schema."""
        config = RunConfig()
        for key, spec in CONFIG_SCHEMA["properties"].items():
            assert getattr(config, key) == spec["default"]

    def test_digest(self):
        """The digest is a 64-character hex string and tracks values."""
        digest = RunConfig().digest()
        assert len(digest) == 64
        int(digest, 16)
        assert RunConfig(M=9).digest() != digest
        assert RunConfig().digest() == digest

    def test_frozen(self):
        """Configurations are immutable."""
        config = RunConfig()
        with pytest.raises(dataclasses.FrozenInstanceError):
            config.M = 3

    def test_integrator(self):
        """integrator() carries scheme, dt, T and record_every."""
        cfg = RunConfig(scheme="rk4", dt=0.1, T=2.0, record_every=3).integrator()
        assert isinstance(cfg, IntegratorConfig)
        assert cfg.scheme == Scheme.RK4
        assert (cfg.dt, cfg.T, cfg.record_every) == (0.1, 2.0, 3)

    def test_budget(self):
        """A zero wall budget means none."""
        assert RunConfig().budget is None
        assert RunConfig(wall_budget=5.0).budget == 5.0


class TestParsing:
    """Tests for parse_config_text."""

    def test_valid(self):
        """Comments and blank lines are skipped, values are coerced."""
        config = parse_config_text("# run\n\nM = 12\nepsilon = 0.02\nsystem = zd\n")
        assert config.M == 12
        assert config.epsilon == 0.02
        assert config.system == "zd"

    def test_unknown_key(self):
        """Unknown keys are named in the error."""
        with pytest.raises(ConfigError, match="unknown key 'width'"):
            parse_config_text("width = 3\n")

    def test_duplicate_key(self):
        """A key may appear once."""
        with pytest.raises(ConfigError, match="M: duplicate key"):
            parse_config_text("M = 3\nM = 4\n")

    def test_bad_value(self):
        """Values that do not coerce are named."""
        with pytest.raises(ConfigError, match="M: expected integer"):
            parse_config_text("M = abc\n")

    def test_missing_equals(self):
        """Lines need a '='."""
        with pytest.raises(ConfigError, match="expected 'key = value'"):
            parse_config_text("M 3\n")

    def test_below_minimum(self):
        """Schema minima are enforced with the key in the message."""
        with pytest.raises(ConfigError, match="^M: "):
            parse_config_text("M = 1\n")

    def test_enum(self):
        """Enumerated keys reject other values."""
        with pytest.raises((ValueError, ConfigError), match="scheme"):
            parse_config_text("scheme = euler\n")

    def test_step_not_below_horizon(self):
        """dt >= T is rejected."""
        with pytest.raises(ConfigError, match="dt: must be smaller than T"):
            parse_config_text("dt = 1.0\nT = 1.0\n")


class TestLoading:
    """Tests for load_config."""

    def test_load(self, write_config):
        """A written run file loads."""
        config = load_config(write_config(M=5, N=7, mode="scan"))
        assert (config.M, config.N, config.mode) == (5, 7, "scan")

    def test_missing_file(self, tmp_path):
        """A missing file is a config error."""
        with pytest.raises(ConfigError, match="file not found"):
            load_config(tmp_path / "absent.conf")


class TestDescribeKeys:
    """Tests for the --help key listing."""

    def test_lists_every_key(self):
        """Every schema key has a line."""
        text = describe_keys()
        for key in CONFIG_SCHEMA["properties"]:
            assert f"  {key} " in text
