"""
Run Configuration
Defaults, .env / environment overrides and validation for CLI runs
"""
import os
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional

from dotenv import load_dotenv

from src.geometry import GEOMETRIES, HYPERSURFACE
from src.series import RegulatorError

DEFAULT_ORDER = 8
DEFAULT_ANOMALY_ORDER = 3
DEFAULT_Z_DEPTH = 6
DEFAULT_REGULATOR = (1, 2, 3, 5, 7, 11, 13, 17, 19, 23)
FORMATS = ("json", "csv", "text")
SUITES = ("pf", "birkhoff", "asymptotics", "genus1", "anomaly")

ENV_ORDER = "QMAP_ORDER"
ENV_Z_DEPTH = "QMAP_Z_DEPTH"
ENV_HODGE_TABLE = "QMAP_HODGE_TABLE"
ENV_OUTPUT_DIR = "QMAP_OUTPUT_DIR"


class ConfigError(ValueError):
    """Bad command-line or environment configuration (exit code 2)."""


def parse_regulator(text: str) -> List[Fraction]:
    """Comma-separated rationals, e.g. "1,2,-1/3"."""
    try:
        return [Fraction(part.strip()) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad regulator {text!r}: {exc}") from exc


@dataclass
class RunConfig:
    command: str = "series"
    geometry: str = "local-p1p1"
    m: int = 2
    n: int = 2
    order: Optional[int] = None
    z_depth: int = DEFAULT_Z_DEPTH
    regulator: List[Fraction] = field(default_factory=list)
    output_format: str = "json"
    hodge_table: Optional[str] = None
    output_dir: str = "output"
    suite: Optional[str] = None
    verbose: bool = False

    @classmethod
    def from_env(cls, env_file: Optional[str] = None, **overrides) -> "RunConfig":
        """
        Defaults, then QMAP_* variables (a .env file is loaded first), then
        explicit overrides; None overrides are ignored.
        """
        load_dotenv(env_file)
        config = cls()
        if os.environ.get(ENV_ORDER):
            config.order = _int_env(ENV_ORDER)
        if os.environ.get(ENV_Z_DEPTH):
            config.z_depth = _int_env(ENV_Z_DEPTH)
        config.hodge_table = os.environ.get(ENV_HODGE_TABLE) or None
        config.output_dir = os.environ.get(ENV_OUTPUT_DIR, config.output_dir)
        for key, value in overrides.items():
            if value is not None:
                setattr(config, key, value)
        return config

    @property
    def effective_order(self) -> int:
        if self.order is not None:
            return self.order
        return DEFAULT_ANOMALY_ORDER if self.suite == "anomaly" else DEFAULT_ORDER

    @property
    def effective_regulator(self) -> List[Fraction]:
        """Regulator rationals c_i, padded from the default list."""
        if self.regulator:
            return list(self.regulator)
        return [Fraction(c) for c in DEFAULT_REGULATOR[: max(self.n, 1)]]

    def validate(self) -> "RunConfig":
        """
        Raises:
            ConfigError: on a bad value
            RegulatorError: if regulator rationals repeat or vanish
        """
        minimum = 0 if self.command == "series" else 1
        if self.effective_order < minimum:
            raise ConfigError(f"order must be >= {minimum}, got {self.effective_order}")
        if self.z_depth < 1:
            raise ConfigError(f"z-depth must be >= 1, got {self.z_depth}")
        if self.geometry not in GEOMETRIES:
            raise ConfigError(f"unknown geometry {self.geometry!r} (choose from {', '.join(GEOMETRIES)})")
        if self.output_format not in FORMATS:
            raise ConfigError(f"unknown format {self.output_format!r}")
        if self.suite is not None and self.suite not in SUITES:
            raise ConfigError(f"unknown suite {self.suite!r}")
        if self.geometry == HYPERSURFACE and (self.m < 2 or self.n < 2):
            raise ConfigError(f"hypersurface needs m, n >= 2, got ({self.m}, {self.n})")
        regulator = self.effective_regulator
        if len(set(regulator)) != len(regulator) or any(c == 0 for c in regulator):
            raise RegulatorError(regulator)
        if self.geometry == HYPERSURFACE and len(regulator) < self.n:
            raise ConfigError(f"{self.n} regulator values needed, got {len(regulator)}")
        return self

    def echo(self) -> Dict:
        return {
            "command": self.command,
            "suite": self.suite,
            "geometry": self.geometry,
            "m": self.m,
            "n": self.n,
            "order": self.effective_order,
            "z_depth": self.z_depth,
            "regulator": [str(c) for c in self.effective_regulator],
            "format": self.output_format,
            "hodge_table": self.hodge_table,
            "output_dir": self.output_dir,
        }

    def hodge_table_path(self) -> Optional[Path]:
        return Path(self.hodge_table) if self.hodge_table else None


def _int_env(name: str) -> int:
    try:
        return int(os.environ[name])
    except ValueError as exc:
        raise ConfigError(f"{name} must be an integer, got {os.environ[name]!r}") from exc
