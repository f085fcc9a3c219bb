"""Bundled regression fixtures: transcribed count tables and the published
reconstructed state they lead to."""

from importlib.resources import files
from pathlib import Path

__all__ = ["fixture_text", "fixture_path", "FIXTURES"]

FIXTURES = (
    "table1_visibility.csv",
    "table2_chsh.csv",
    "table3_freedman.csv",
    "table4_tomo.csv",
    "rho_published.json",
)


def fixture_text(name: str) -> str:
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; available: {FIXTURES}")
    return (files(__package__) / name).read_text(encoding="utf-8")


def fixture_path(name: str) -> Path:
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; available: {FIXTURES}")
    return Path(str(files(__package__) / name))
