"""
Runtime configuration for sepscope.

Settings come from three layers, later layers winning:
1. Built-in defaults (the dataclass field defaults below)
2. A YAML file: SEPSCOPE_CONFIG if set, else system/config/sepscope.yaml
3. Environment overrides: SEPSCOPE_THREADS, SEPSCOPE_RUN_LOGS, SEPSCOPE_LOG_DIR

Usage:
    from sepscope.config import get_settings

    tol = get_settings().tolerances
    if norm > 1 + tol.rccn:
        ...
"""

import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

import yaml

from .errors import ConfigError


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds used by validation and verdict logic."""
    hermiticity: float = 1e-10     # ||M - M^dagger||_inf, scaled by max(1, ||M||_inf)
    trace: float = 1e-10
    positivity: float = 1e-10      # smallest admissible eigenvalue is -positivity
    normalization: float = 1e-10   # | ||D||_2 - 1 | for pure-state coefficients
    weights: float = 1e-12         # | sum(p) - 1 | for mixtures
    rccn: float = 1e-9
    ppt: float = 1e-9
    symmetry: float = 1e-10
    schmidt_cutoff: float = 1e-12  # relative to the largest delta
    support: float = 1e-12

    def to_dict(self) -> dict:
        """Return the thresholds as a plain dict."""
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class Settings:
    """Process-wide settings."""
    tolerances: Tolerances = field(default_factory=Tolerances)
    default_ratio: float = 0.5
    default_dim: int = 8
    example39_dim: int = 12
    threads: Optional[int] = None
    run_logs: bool = True
    log_dir: str = "logs"

    @classmethod
    def discover(cls) -> "Settings":
        """
        Build settings from defaults, the config file and the environment.

        Raises:
            ConfigError: If the file or an override holds an invalid value
        """
        settings = cls()

        path = default_config_path()
        if path.exists():
            settings = settings.merged(load_config_file(path))
        elif os.environ.get("SEPSCOPE_CONFIG"):
            raise ConfigError(f"Config file not found: {path}")

        return settings.with_env_overrides()

    def merged(self, data: dict) -> "Settings":
        """Return a copy with values from a parsed config mapping applied."""
        tolerances = self.tolerances
        tol_data = data.get("tolerances") or {}
        if tol_data:
            known = {f.name for f in fields(Tolerances)}
            unknown = set(tol_data) - known
            if unknown:
                raise ConfigError(f"Unknown tolerances: {sorted(unknown)}")
            tolerances = replace(
                tolerances,
                **{k: _positive_float(f"tolerances.{k}", v) for k, v in tol_data.items()},
            )

        defaults = data.get("defaults") or {}
        sweep = data.get("sweep") or {}
        logging_cfg = data.get("logging") or {}

        return replace(
            self,
            tolerances=tolerances,
            default_ratio=_ratio("defaults.ratio", defaults.get("ratio", self.default_ratio)),
            default_dim=_count("defaults.dim", defaults.get("dim", self.default_dim)),
            example39_dim=_count("defaults.example39_dim", defaults.get("example39_dim", self.example39_dim)),
            threads=_threads("sweep.threads", sweep.get("threads", self.threads)),
            run_logs=bool(logging_cfg.get("run_logs", self.run_logs)),
            log_dir=str(logging_cfg.get("log_dir", self.log_dir)),
        )

    def with_env_overrides(self) -> "Settings":
        """Apply SEPSCOPE_* environment variables."""
        settings = self
        if os.environ.get("SEPSCOPE_THREADS"):
            settings = replace(settings, threads=_threads("SEPSCOPE_THREADS", os.environ["SEPSCOPE_THREADS"]))
        if os.environ.get("SEPSCOPE_RUN_LOGS"):
            flag = os.environ["SEPSCOPE_RUN_LOGS"].strip().lower()
            settings = replace(settings, run_logs=flag not in ("0", "false", "no", "off"))
        if os.environ.get("SEPSCOPE_LOG_DIR"):
            settings = replace(settings, log_dir=os.environ["SEPSCOPE_LOG_DIR"])
        return settings

    def worker_count(self) -> int:
        """Threads to use for sweeps (machine parallelism when unset)."""
        return self.threads or os.cpu_count() or 1


def default_config_path() -> Path:
    """Path of the config file to read (may not exist)."""
    if os.environ.get("SEPSCOPE_CONFIG"):
        return Path(os.environ["SEPSCOPE_CONFIG"])
    # This file is at sepscope/config.py, so parent.parent is the repo root
    return Path(__file__).parent.parent / "system" / "config" / "sepscope.yaml"


def load_config_file(path: Path) -> dict:
    """Read a YAML config file into a mapping."""
    try:
        with open(path) as f:
            data = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ConfigError(f"Invalid YAML in {path}: {e}") from e

    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"Config root must be a mapping: {path}")
    return data


def _positive_float(name: str, value) -> float:
    try:
        result = float(value)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{name} must be a number, got {value!r}") from e
    if not result > 0:
        raise ConfigError(f"{name} must be positive, got {result}")
    return result


def _ratio(name: str, value) -> float:
    result = _positive_float(name, value)
    if result >= 1:
        raise ConfigError(f"{name} must lie in (0, 1), got {result}")
    return result


def _count(name: str, value) -> int:
    try:
        result = int(value)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{name} must be an integer, got {value!r}") from e
    if result < 1:
        raise ConfigError(f"{name} must be >= 1, got {result}")
    return result


def _threads(name: str, value) -> Optional[int]:
    if value is None:
        return None
    return _count(name, value)


# Global singleton for convenience
_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """Get the global Settings singleton."""
    global _settings
    if _settings is None:
        _settings = Settings.discover()
    return _settings


def reset_settings():
    """Reset the global settings (useful for testing)."""
    global _settings
    _settings = None
