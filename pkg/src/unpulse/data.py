"""Bundled sequence tables and example protocol configs.

The data directory can be overridden with the UNPULSE_DATA_DIR environment
variable; by default the files shipped with the package are used.
"""

from __future__ import annotations

import json
import os
from importlib import resources
from pathlib import Path

from .pulses import PhaseSequence

DATA_DIR_ENV = "UNPULSE_DATA_DIR"


def _data_path(filename: str) -> Path:
    override = os.environ.get(DATA_DIR_ENV)
    if override:
        return Path(override) / filename
    return Path(resources.files("unpulse").joinpath("data", filename))


def load_json(filename: str) -> dict:
    path = _data_path(filename)
    if not path.exists():
        raise FileNotFoundError(f"bundled data file not found: {path}")
    return json.loads(path.read_text())


def table_entries() -> list[dict]:
    """Bundled narrowband sequences with their published widths."""
    return load_json("table1.json")["sequences"]


def sequence_names() -> list[str]:
    return ["single"] + [e["name"] for e in table_entries()]


def get_sequence(name: str) -> PhaseSequence:
    """Look up a bundled sequence by name; "single" is the one-pulse sequence."""
    if name == "single":
        return PhaseSequence((0.0,), name="single")
    for entry in table_entries():
        if entry["name"] == name:
            return PhaseSequence.from_pi(entry["phases_pi"], name=entry["name"])
    raise KeyError(f"unknown sequence {name!r}; available: {', '.join(sequence_names())}")


def claimed_alpha(name: str) -> float:
    for entry in table_entries():
        if entry["name"] == name:
            return float(entry["alpha"])
    raise KeyError(f"no tabulated width for sequence {name!r}")
