"""The packaged fixture corpus (problem files under ``sublevel/fixtures``)."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .problem import ProblemFile, parse_problem_text

_PACKAGE = "sublevel"


def _root():
    return resources.files(_PACKAGE).joinpath("fixtures")


def names() -> list[str]:
    return sorted(p.name[:-5] for p in _root().iterdir() if p.name.endswith(".json"))


def text(name: str) -> str:
    return _root().joinpath(f"{name}.json").read_text(encoding="utf-8")


def load(name: str) -> ProblemFile:
    return parse_problem_text(text(name))


def phase_names() -> list[str]:
    """Fixtures that carry a phase (everything except pure pattern files)."""
    return [n for n in names() if load(n).phase is not None]


def resolve(path: str | Path) -> str:
    """Read ``path``; fall back to the packaged fixture with the same file name."""
    p = Path(path)
    if p.exists():
        return p.read_text(encoding="utf-8")
    stem = p.name[:-5] if p.name.endswith(".json") else p.name
    if stem in names():
        return text(stem)
    raise FileNotFoundError(str(path))
