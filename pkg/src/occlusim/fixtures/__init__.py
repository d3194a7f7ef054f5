"""Shipped scenario fixtures."""

from importlib import resources
from pathlib import Path

NAMES = ("single_rv_50.json", "unicaragil.json", "empty.json")


def fixture_path(name: str) -> Path | None:
    """Filesystem path of a shipped fixture, or None if no such fixture."""
    if not name.endswith(".json"):
        name = f"{name}.json"
    if name not in NAMES:
        return None
    ref = resources.files(__package__) / name
    with resources.as_file(ref) as path:
        return Path(path)
