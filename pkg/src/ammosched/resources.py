"""Locate files bundled with the package (geometry, lull scenario, configs)."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

ASR_GEOMETRY = "asr_geometry.toml"
MS_TANK_GEOMETRY = "ms_tank_geometry.toml"
LULL_SCENARIO = "lull_scenario.csv"
LULL_CONFIG = "lull_config.toml"


def data_path(name: str) -> Path:
    path = Path(str(resources.files("ammosched") / "data" / name))
    if not path.exists():
        raise FileNotFoundError(f"no bundled data file {name!r}")
    return path
