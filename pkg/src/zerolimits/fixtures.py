"""Recurrences shipped with the package as JSON spec files."""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from .recurrence import RecurrenceSpec

NAMES = ("ladder", "p4", "p4_raw")


def fixture_path(name: str) -> Path:
    if name not in NAMES:
        raise KeyError(f"unknown fixture {name!r}; choose from {', '.join(NAMES)}")
    return Path(str(resources.files("zerolimits") / "data" / f"{name}.json"))


def load_fixture(name: str) -> RecurrenceSpec:
    from .cli import parse_spec

    return parse_spec(json.loads(fixture_path(name).read_text(encoding="utf-8")))
