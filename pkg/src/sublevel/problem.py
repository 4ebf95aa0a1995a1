"""Problem files: JSON documents with exact rationals written as ``"num/den"``.

Canonical field order is ``name, phase, maps, box, epsilons, lambdas, budget,
pattern``; only ``phase`` (or ``pattern`` for density runs) is required.
Frequencies in ``lambdas`` may carry a ``*pi`` suffix, e.g. ``"2/1*pi"``.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional, Sequence

from .exactpoly import Polynomial
from .linmaps import LinearMap, MapSystem, NonSurjectiveMapError

FIELDS = ("name", "phase", "maps", "box", "epsilons", "lambdas", "budget", "pattern")
_RATIONAL = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")
_FREQUENCY = re.compile(r"^\s*(.*?)\s*(\*\s*pi)?\s*$")


class ProblemError(ValueError):
    """Malformed problem file; ``path`` locates the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


def parse_rational(text: Any, path: str) -> Fraction:
    if isinstance(text, bool):
        raise ProblemError(path, f"invalid rational {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise ProblemError(path, f"rationals must be 'num/den' strings, got {text!r}")
    m = _RATIONAL.match(text)
    if not m:
        raise ProblemError(path, f"invalid rational {text!r}")
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ProblemError(path, f"invalid rational {text!r} (zero denominator)")
    return Fraction(int(m.group(1)), den)


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Frequency:
    """A frequency ``coefficient`` or ``coefficient * pi``."""

    coefficient: Fraction
    times_pi: bool = False

    def __float__(self) -> float:
        return float(self.coefficient) * (math.pi if self.times_pi else 1.0)

    def __str__(self) -> str:
        return format_rational(self.coefficient) + ("*pi" if self.times_pi else "")

    @classmethod
    def parse(cls, text: Any, path: str) -> "Frequency":
        if isinstance(text, str):
            m = _FREQUENCY.match(text)
            return cls(parse_rational(m.group(1), path), bool(m.group(2)))
        return cls(parse_rational(text, path))


@dataclass(frozen=True)
class ProblemFile:
    phase: Optional[Polynomial]
    maps: MapSystem
    name: Optional[str] = None
    box: Optional[tuple[tuple[Fraction, Fraction], ...]] = None
    epsilons: Optional[tuple[Fraction, ...]] = None
    lambdas: Optional[tuple[Frequency, ...]] = None
    budget: Optional[int] = None
    pattern: Optional[tuple[tuple[int, ...], ...]] = None

    @property
    def dimension(self) -> int:
        return self.maps.domain_dim

    def box_or_default(self) -> tuple[tuple[Fraction, Fraction], ...]:
        return self.box or tuple((Fraction(-1), Fraction(1)) for _ in range(self.dimension))


def _expect(kind, value, path):
    if not isinstance(value, kind) or isinstance(value, bool):
        raise ProblemError(path, f"expected {kind.__name__}, got {type(value).__name__}")
    return value


def _parse_phase(raw: Any, path: str) -> Polynomial:
    _expect(dict, raw, path)
    unknown = set(raw) - {"dimension", "terms"}
    if unknown:
        raise ProblemError(path, f"unknown phase fields {sorted(unknown)}")
    if "dimension" not in raw:
        raise ProblemError(path, "missing 'dimension'")
    d = _expect(int, raw["dimension"], f"{path}.dimension")
    if d < 1:
        raise ProblemError(f"{path}.dimension", "dimension must be positive")
    terms: dict[tuple[int, ...], Fraction] = {}
    for i, term in enumerate(_expect(list, raw.get("terms", []), f"{path}.terms")):
        tpath = f"{path}.terms[{i}]"
        if not isinstance(term, list) or len(term) != 2:
            raise ProblemError(tpath, "term must be [exponent vector, coefficient]")
        exps = _expect(list, term[0], f"{tpath}[0]")
        if len(exps) != d:
            raise ProblemError(f"{tpath}[0]", f"exponent vector has length {len(exps)}, expected {d}")
        exps = tuple(_expect(int, a, f"{tpath}[0][{k}]") for k, a in enumerate(exps))
        if any(a < 0 for a in exps):
            raise ProblemError(f"{tpath}[0]", "negative exponent")
        if exps in terms:
            raise ProblemError(f"{tpath}[0]", f"duplicate exponent {list(exps)}")
        terms[exps] = parse_rational(term[1], f"{tpath}[1]")
    return Polynomial(d, terms)


def _parse_maps(raw: Any, d: int, path: str = "maps") -> MapSystem:
    maps = []
    for j, mat in enumerate(_expect(list, raw, path)):
        mpath = f"{path}[{j}]"
        rows = _expect(list, mat, mpath)
        if not rows:
            raise ProblemError(mpath, "map has no rows")
        parsed = []
        for i, row in enumerate(rows):
            row = _expect(list, row, f"{mpath}[{i}]")
            if len(row) != d:
                raise ProblemError(f"{mpath}[{i}]", f"row has length {len(row)}, expected {d}")
            parsed.append([parse_rational(v, f"{mpath}[{i}][{k}]") for k, v in enumerate(row)])
        maps.append(LinearMap(parsed))
    system = MapSystem(d, tuple(maps))
    try:
        system.require_surjective()
    except NonSurjectiveMapError as exc:
        raise ProblemError(f"{path}[{exc.index}]", str(exc)) from None
    return system


def problem_from_dict(doc: Any) -> ProblemFile:
    _expect(dict, doc, "")
    unknown = set(doc) - set(FIELDS)
    if unknown:
        raise ProblemError("", f"unknown fields {sorted(unknown)}")
    phase = _parse_phase(doc["phase"], "phase") if "phase" in doc else None
    pattern = None
    if "pattern" in doc:
        pts = _expect(list, doc["pattern"], "pattern")
        if not pts:
            raise ProblemError("pattern", "pattern must be nonempty")
        pattern = []
        for i, p in enumerate(pts):
            p = _expect(list, p, f"pattern[{i}]")
            pattern.append(tuple(_expect(int, a, f"pattern[{i}][{k}]") for k, a in enumerate(p)))
        if len({len(p) for p in pattern}) != 1:
            raise ProblemError("pattern", "pattern points have different lengths")
        if len(set(pattern)) != len(pattern):
            raise ProblemError("pattern", "pattern points must be distinct")
        pattern = tuple(pattern)
    if phase is None and pattern is None:
        raise ProblemError("", "missing 'phase'")
    d = phase.dimension if phase is not None else len(pattern[0])
    maps = _parse_maps(doc.get("maps", []), d)

    box = None
    if "box" in doc:
        sides = _expect(list, doc["box"], "box")
        if len(sides) != d:
            raise ProblemError("box", f"box has {len(sides)} sides, expected {d}")
        box = []
        for i, side in enumerate(sides):
            if not isinstance(side, list) or len(side) != 2:
                raise ProblemError(f"box[{i}]", "side must be [lo, hi]")
            lo, hi = (parse_rational(v, f"box[{i}][{k}]") for k, v in enumerate(side))
            if not lo < hi:
                raise ProblemError(f"box[{i}]", "empty interval")
            box.append((lo, hi))
        box = tuple(box)

    epsilons = None
    if "epsilons" in doc:
        epsilons = tuple(
            parse_rational(v, f"epsilons[{i}]")
            for i, v in enumerate(_expect(list, doc["epsilons"], "epsilons"))
        )
        for i, e in enumerate(epsilons):
            if e <= 0:
                raise ProblemError(f"epsilons[{i}]", "epsilon must be positive")
    lambdas = None
    if "lambdas" in doc:
        lambdas = tuple(
            Frequency.parse(v, f"lambdas[{i}]")
            for i, v in enumerate(_expect(list, doc["lambdas"], "lambdas"))
        )
    budget = None
    if "budget" in doc:
        budget = _expect(int, doc["budget"], "budget")
        if budget < 1:
            raise ProblemError("budget", "budget must be positive")
    name = _expect(str, doc["name"], "name") if "name" in doc else None
    return ProblemFile(
        phase=phase, maps=maps, name=name, box=box, epsilons=epsilons,
        lambdas=lambdas, budget=budget, pattern=pattern,
    )


def parse_problem_text(text: str) -> ProblemFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    return problem_from_dict(doc)


def parse_problem(path: str | Path) -> ProblemFile:
    return parse_problem_text(Path(path).read_text(encoding="utf-8"))


def phase_to_dict(P: Polynomial) -> dict:
    return {
        "dimension": P.dimension,
        "terms": [[list(e), format_rational(c)] for e, c in P.items()],
    }


def problem_to_dict(prob: ProblemFile) -> dict:
    doc: dict[str, Any] = {}
    if prob.name is not None:
        doc["name"] = prob.name
    if prob.phase is not None:
        doc["phase"] = phase_to_dict(prob.phase)
    doc["maps"] = [[[format_rational(v) for v in row] for row in m.matrix] for m in prob.maps]
    if prob.box is not None:
        doc["box"] = [[format_rational(lo), format_rational(hi)] for lo, hi in prob.box]
    if prob.epsilons is not None:
        doc["epsilons"] = [format_rational(e) for e in prob.epsilons]
    if prob.lambdas is not None:
        doc["lambdas"] = [str(lam) for lam in prob.lambdas]
    if prob.budget is not None:
        doc["budget"] = prob.budget
    if prob.pattern is not None:
        doc["pattern"] = [list(p) for p in prob.pattern]
    return doc


def _compact(value) -> str:
    return json.dumps(value, separators=(", ", ": "))


def _lines(items: list, indent: str) -> str:
    if not items:
        return "[]"
    inner = (",\n" + indent + "  ").join(_compact(v) for v in items)
    return "[\n" + indent + "  " + inner + "\n" + indent + "]"


def serialize_problem(prob: ProblemFile) -> str:
    """Canonical text: one top-level field per line, one term/map/point per line."""
    doc = problem_to_dict(prob)
    out = []
    for key, value in doc.items():
        if key == "phase":
            body = (
                '{"dimension": %d, "terms": %s}'
                % (value["dimension"], _lines(value["terms"], "  "))
            )
        elif key in ("maps", "pattern"):
            body = _lines(value, "  ")
        else:
            body = _compact(value)
        out.append(f"  {json.dumps(key)}: {body}")
    return "{\n" + ",\n".join(out) + "\n}\n"


def canonical(text: str) -> str:
    return serialize_problem(parse_problem_text(text))


def make_problem(
    phase: Polynomial,
    rows_or_maps: Sequence,
    **extra,
) -> ProblemFile:
    """Convenience constructor; ``rows_or_maps`` holds LinearMaps or matrices."""
    maps = tuple(m if isinstance(m, LinearMap) else LinearMap(m) for m in rows_or_maps)
    return ProblemFile(phase=phase, maps=MapSystem(phase.dimension, maps), **extra)
