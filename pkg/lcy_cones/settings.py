from __future__ import annotations

import json
import logging
import os
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

from .config import GRID_MAX_DEPTH, GRID_MAX_DEPTH_N1, GRID_MAX_TOTAL
from .exceptions import ConfigError

# Load environment variables from .env file if present
load_dotenv()

# Configuration mapping: settings_attr -> env_var
ENV_VAR_MAPPING = {
    "max_rank": "LCY_CONES_MAX_RANK",
    "output_format": "LCY_CONES_FORMAT",
    "default_radius": "LCY_CONES_RADIUS",
    "default_max_iter": "LCY_CONES_MAX_ITER",
    "workers": "LCY_CONES_WORKERS",
    "weyl_samples": "LCY_CONES_WEYL_SAMPLES",
    "seed": "LCY_CONES_SEED",
}

OUTPUT_FORMATS = ("json", "text")


def _config_dir() -> Path:
    xdg = os.environ.get("XDG_CONFIG_HOME")
    if xdg:
        return Path(xdg) / "lcy_cones"
    return Path.home() / ".config" / "lcy_cones"


def config_path() -> Path:
    return _config_dir() / "config.json"


@dataclass
class EngineSettings:
    output_format: str = "json"

    # desk grid bounds
    grid_max_depth: int = 4
    grid_min_depth_n1: int = 3
    grid_max_depth_n1: int = 6
    grid_max_total: int = 14

    default_radius: int = 3
    default_max_iter: int = 10_000
    # sampled Weyl and sigma(y) checks of the verification suite
    weyl_samples: int = 200
    sigma_samples: int = 10
    seed: int = 0

    max_rank: int = 24  # cost guard on model rank
    workers: int = 1

    def validate(self) -> EngineSettings:
        """Raise ConfigError on the first out-of-range value."""
        if self.output_format not in OUTPUT_FORMATS:
            raise ConfigError("output_format", self.output_format, f"must be one of {', '.join(OUTPUT_FORMATS)}")
        if self.default_radius < 0:
            raise ConfigError("default_radius", self.default_radius, "must be >= 0")
        if self.default_max_iter < 1:
            raise ConfigError("default_max_iter", self.default_max_iter, "must be >= 1")
        if not 1 <= self.grid_max_depth <= GRID_MAX_DEPTH:
            raise ConfigError("grid_max_depth", self.grid_max_depth, f"must be between 1 and {GRID_MAX_DEPTH}")
        if self.grid_min_depth_n1 < 3:
            raise ConfigError("grid_min_depth_n1", self.grid_min_depth_n1, "n=1 chains need at least 3 blowups")
        if self.grid_max_depth_n1 > GRID_MAX_DEPTH_N1:
            raise ConfigError("grid_max_depth_n1", self.grid_max_depth_n1, f"must be <= {GRID_MAX_DEPTH_N1}")
        if self.grid_min_depth_n1 > self.grid_max_depth_n1:
            raise ConfigError("grid_max_depth_n1", self.grid_max_depth_n1, "must not be below grid_min_depth_n1")
        if not 1 <= self.grid_max_total <= GRID_MAX_TOTAL:
            raise ConfigError("grid_max_total", self.grid_max_total, f"must be between 1 and {GRID_MAX_TOTAL}")
        if self.weyl_samples < 0:
            raise ConfigError("weyl_samples", self.weyl_samples, "must be >= 0")
        if self.sigma_samples < 0:
            raise ConfigError("sigma_samples", self.sigma_samples, "must be >= 0")
        if self.max_rank < 1:
            raise ConfigError("max_rank", self.max_rank, "must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers", self.workers, "must be >= 1")
        return self


def _apply_env(s: EngineSettings) -> EngineSettings:
    """Environment variables win over the settings file."""
    types = {f.name: f.type for f in fields(EngineSettings)}
    for attr, env_var in ENV_VAR_MAPPING.items():
        raw = os.environ.get(env_var)
        if raw is None or raw == "":
            continue
        if types[attr] in (int, "int"):
            try:
                value = int(raw)
            except ValueError:
                raise ConfigError(attr, raw, f"{env_var} must be an integer")
        else:
            value = raw.strip().lower()
        setattr(s, attr, value)
    return s


def load_settings(path: Optional[Path] = None, apply_env: bool = True) -> EngineSettings:
    """Load settings from the config file, then apply environment overrides.

    Returns default settings if the file doesn't exist or is corrupted.
    """
    path = path or config_path()
    s = EngineSettings()
    try:
        if path.exists():
            data = json.loads(path.read_text(encoding="utf-8"))
            # Filter out unknown fields to support forward compatibility
            valid_fields = {f.name for f in fields(EngineSettings)}
            filtered_data = {k: v for k, v in data.items() if k in valid_fields}
            s = EngineSettings(**filtered_data)
    except json.JSONDecodeError as e:
        logging.warning(f"Failed to parse settings file {path}: {e}")
    except Exception as e:
        logging.error(f"Unexpected error loading settings: {e}")

    if apply_env:
        s = _apply_env(s)
    return s


def save_settings(s: EngineSettings, path: Optional[Path] = None) -> Path:
    path = path or config_path()
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(asdict(s), indent=2), encoding="utf-8")
    return path


def settings_source(attr: str, path: Optional[Path] = None) -> str:
    """Where a resolved value comes from: "env", "file" or "default"."""
    env_var = ENV_VAR_MAPPING.get(attr)
    if env_var and os.environ.get(env_var):
        return "env"
    path = path or config_path()
    try:
        if path.exists() and attr in json.loads(path.read_text(encoding="utf-8")):
            return "file"
    except (json.JSONDecodeError, OSError):
        pass
    return "default"
