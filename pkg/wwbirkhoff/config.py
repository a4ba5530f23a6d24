"""
Run Configuration
=================

Flat `key = value` run files for the command-line tool.

    # example.conf
    M = 12
    tol = 1e-9
    scheme = implicit-midpoint

Lines starting with '#' and blank lines are ignored. Values are coerced by
the type declared in CONFIG_SCHEMA and then validated with jsonschema;
unknown keys are errors. Every error message names the offending key.

Environment:
    WWBIRKHOFF_THREADS: default worker count when --threads is not given
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from types import MappingProxyType
from typing import Any, Dict, Mapping, Optional, Union

import jsonschema

from .constants import TOLERANCES
from .dynamics import IntegratorConfig

logger = logging.getLogger(__name__)

__all__ = [
    "ConfigError",
    "CONFIG_SCHEMA",
    "RunConfig",
    "parse_config_text",
    "load_config",
    "default_threads",
    "describe_keys",
]

# Maximum config file size, same guard style as JSON inputs
MAX_CONFIG_SIZE = 64 * 1024

_env_threads = os.environ.get("WWBIRKHOFF_THREADS", "")
DEFAULT_THREADS = int(_env_threads) if _env_threads.isdigit() and int(_env_threads) > 0 else 1


class ConfigError(ValueError):
    """Raised on malformed or invalid run configuration."""
    pass


CONFIG_SCHEMA: Mapping[str, Any] = MappingProxyType({
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "M": {"type": "integer", "minimum": 2, "default": 8,
              "description": "Fourier truncation (modes 0 < |k| <= M)"},
        "N": {"type": "integer", "minimum": 1, "default": 10,
              "description": "mode bound of resonance scans"},
        "epsilon": {"type": "number", "minimum": 0, "default": 0.05,
                    "description": "initial Ḣ^s size of random data"},
        "s": {"type": "number", "minimum": 0, "default": 1.0,
              "description": "Sobolev index of recorded norms"},
        "seed": {"type": "integer", "minimum": 0, "default": 0,
                 "description": "random seed"},
        "dt": {"type": "number", "exclusiveMinimum": 0, "default": 0.01,
               "description": "time step"},
        "T": {"type": "number", "exclusiveMinimum": 0, "default": 10.0,
              "description": "final time"},
        "scheme": {"type": "string", "enum": ["rk4", "implicit-midpoint"], "default": "implicit-midpoint",
                   "description": "time stepping scheme"},
        "system": {"type": "string", "enum": ["ww", "zd"], "default": "ww",
                   "description": "water waves or Zakharov-Dyachenko flow"},
        "degree": {"type": "integer", "enum": [2, 3, 4], "default": 4,
                   "description": "highest Hamiltonian degree of the water-waves flow"},
        "record_every": {"type": "integer", "minimum": 1, "default": 10,
                         "description": "steps between trajectory rows"},
        "mode": {"type": "string", "enum": ["enumerate", "cubic-min", "scan"], "default": "enumerate",
                 "description": "resonances subcommand mode"},
        "tol": {"type": "number", "minimum": 0, "default": TOLERANCES["identity"],
                "description": "identity / coefficient tolerance"},
        "null_tol": {"type": "number", "minimum": 0, "default": TOLERANCES["null_condition"],
                     "description": "Benjamin-Feir tolerance relative to the largest coefficient"},
        "horizon": {"type": "number", "exclusiveMinimum": 0, "default": 1.0e4,
                    "description": "longest time of a norm-growth run"},
        "wall_budget": {"type": "number", "minimum": 0, "default": 0.0,
                        "description": "wall-clock seconds per run, 0 for none"},
        "output_dir": {"type": "string", "minLength": 1, "default": ".",
                       "description": "directory for written files"},
        "bucket_width": {"type": "integer", "minimum": 1, "default": 1,
                         "description": "max|n| bucket width of the small-divisor table"},
    },
})


def _coerce(key: str, raw: str) -> Any:
    spec = CONFIG_SCHEMA["properties"].get(key)
    if spec is None:
        raise ConfigError(f"unknown key {key!r}")
    kind = spec["type"]
    try:
        if kind == "integer":
            return int(raw)
        if kind == "number":
            return float(raw)
    except ValueError as e:
        raise ConfigError(f"{key}: expected {kind}, got {raw!r}") from e
    return raw


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration; defaults come from CONFIG_SCHEMA."""
    M: int = 8
    N: int = 10
    epsilon: float = 0.05
    s: float = 1.0
    seed: int = 0
    dt: float = 0.01
    T: float = 10.0
    scheme: str = "implicit-midpoint"
    system: str = "ww"
    degree: int = 4
    record_every: int = 10
    mode: str = "enumerate"
    tol: float = TOLERANCES["identity"]
    null_tol: float = TOLERANCES["null_condition"]
    horizon: float = 1.0e4
    wall_budget: float = 0.0
    output_dir: str = "."
    bucket_width: int = 1

    def __post_init__(self):
        _validate(self.to_dict())
        if self.dt >= self.T:
            raise ConfigError(f"dt: must be smaller than T ({self.dt} >= {self.T})")

    @classmethod
    def from_dict(cls, values: Mapping[str, Any]) -> "RunConfig":
        """
        Raises:
            ConfigError: On unknown keys or invalid values
        """
        known = {f.name for f in fields(cls)}
        for key in values:
            if key not in known:
                raise ConfigError(f"unknown key {key!r}")
        _validate(dict(values))
        return cls(**values)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def digest(self) -> str:
        """SHA3-256 of the canonical JSON form."""
        return hashlib.sha3_256(self.canonical_json().encode("utf-8")).hexdigest()

    def integrator(self) -> IntegratorConfig:
        return IntegratorConfig(self.scheme, self.dt, self.T, self.record_every)

    @property
    def budget(self) -> Optional[float]:
        return self.wall_budget if self.wall_budget > 0 else None


def _validate(values: Dict[str, Any]) -> None:
    try:
        jsonschema.validate(values, dict(CONFIG_SCHEMA))
    except jsonschema.ValidationError as e:
        if e.path:
            key = str(e.path[-1])
        elif e.validator == "additionalProperties":
            extra = sorted(set(values) - set(CONFIG_SCHEMA["properties"]))
            key = extra[0] if extra else "<config>"
        else:
            key = "<config>"
        raise ConfigError(f"{key}: {e.message}") from e


def parse_config_text(text: str, source: str = "<string>") -> RunConfig:
    """
    Parse `key = value` lines.

    Raises:
        ConfigError: On syntax errors, duplicate or unknown keys, bad values
    """
    values: Dict[str, Any] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key in values:
            raise ConfigError(f"{key}: duplicate key ({source}:{lineno})")
        values[key] = _coerce(key, raw)
    config = RunConfig.from_dict(values)
    logger.debug("loaded config %s from %s", config.digest()[:12], source)
    return config


def load_config(path: Union[str, Path]) -> RunConfig:
    """
    Load a run file.

    Raises:
        ConfigError: If the file is missing, too large or invalid
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config: file not found: {path}")
    if path.stat().st_size > MAX_CONFIG_SIZE:
        raise ConfigError(f"config: file larger than {MAX_CONFIG_SIZE} bytes: {path}")
    return parse_config_text(path.read_text(encoding="utf-8"), str(path))


def default_threads() -> int:
    return DEFAULT_THREADS


def describe_keys() -> str:
    """One line per key, for --help."""
    lines = ["config keys (key = value):"]
    for key, spec in CONFIG_SCHEMA["properties"].items():
        extra = f" {spec['enum']}" if "enum" in spec else ""
        lines.append(f"  {key:<13} {spec['type']:<8} {spec['description']} (default {spec['default']}){extra}")
    return "\n".join(lines)
