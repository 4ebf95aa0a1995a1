"""Finite witnesses ``(S, c)`` for nondegeneracy.

A witness is a finite ``S`` in ``Z^d`` with scalars ``c_s`` such that
``sum c_s P(s) != 0`` while every ``f_j o l_j`` sums to zero against ``c``.
The second condition only depends on the fibers of each ``l_j`` on ``S``:
``c`` must sum to zero over every fiber.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import product
from typing import Optional, Sequence

from .exactpoly import DimensionError, Polynomial, compose_linear, evaluate
from .linalg import Echelon
from .linmaps import LinearMap, MapSystem

Point = tuple[int, ...]

#: Candidate free columns inspected when choosing a small-support witness.
_SUPPORT_CANDIDATES = 16


@dataclass(frozen=True)
class FiberPartition:
    """Indices of points grouped by their exact image under one map."""

    groups: dict[tuple[Fraction, ...], list[int]]

    def __len__(self) -> int:
        return len(self.groups)


def fiber_partition(m: LinearMap, S: Sequence[Sequence[int]]) -> FiberPartition:
    groups: dict[tuple[Fraction, ...], list[int]] = {}
    for i, s in enumerate(S):
        if len(s) != m.domain_dim:
            raise DimensionError(f"point {tuple(s)} does not have length {m.domain_dim}")
        groups.setdefault(m(s), []).append(i)
    return FiberPartition(groups)


@dataclass(frozen=True)
class Witness:
    points: tuple[Point, ...]
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(tuple(int(a) for a in p) for p in self.points))
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))
        if len(self.points) != len(self.coeffs):
            raise ValueError("points and coeffs must have equal length")

    @property
    def dimension(self) -> int:
        return len(self.points[0])

    @property
    def contains_origin(self) -> bool:
        return any(not any(p) for p in self.points)

    @property
    def is_integer(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    @property
    def l1_norm(self) -> Fraction:
        return sum((abs(c) for c in self.coeffs), Fraction(0))

    def value(self, P: Polynomial) -> Fraction:
        """``sum_s c_s P(s)``."""
        return sum((c * evaluate(P, p) for p, c in zip(self.points, self.coeffs)), Fraction(0))

    def with_origin(self) -> "Witness":
        if self.contains_origin:
            return self
        zero = (0,) * self.dimension
        return Witness((zero,) + self.points, (Fraction(0),) + self.coeffs)

    def dilate(self, k: int) -> "Witness":
        return Witness(tuple(tuple(k * a for a in p) for p in self.points), self.coeffs)


@dataclass(frozen=True)
class SearchSchedule:
    max_radius: int = 6
    modulus_sequence: tuple[int, ...] = (1, 2)

    def __post_init__(self):
        if self.max_radius < 1:
            raise ValueError("max_radius must be positive")
        if not self.modulus_sequence or any(m < 1 for m in self.modulus_sequence):
            raise ValueError("moduli must be positive integers")


@dataclass(frozen=True)
class SearchExhausted:
    """No witness inside any cube of the schedule. Not a proof of degeneracy."""

    schedule: SearchSchedule
    largest_radius: int
    cells_tried: list[tuple[int, int]] = field(default_factory=list)


@dataclass(frozen=True)
class WitnessFound:
    witness: Witness
    radius: int
    modulus: int
    cube_size: int


def cube(N: int, d: int, M: int = 1) -> list[Point]:
    """``M * {-N..N}^d`` ordered by sup norm, then l1 norm, positive side first."""
    pts = product(range(-N, N + 1), repeat=d)
    key = lambda x: (max(map(abs, x), default=0), sum(map(abs, x)), tuple(-a for a in x))
    return [tuple(M * a for a in x) for x in sorted(pts, key=key)]


def _fiber_echelon(S: Sequence[Point], s: MapSystem) -> Echelon:
    ech = Echelon()
    for m in s.maps:
        for idx in fiber_partition(m, S).groups.values():
            ech.insert({i: 1 for i in idx})
    return ech


def witness_space(S: Sequence[Sequence[int]], s: MapSystem) -> list[tuple[Fraction, ...]]:
    """Basis of ``{c : c sums to zero over every fiber of every map on S}``."""
    S = [tuple(p) for p in S]
    ech = _fiber_echelon(S, s)
    basis = []
    for f in ech.free_columns(len(S)):
        v = ech.null_vector(f)
        basis.append(tuple(v.get(i, Fraction(0)) for i in range(len(S))))
    return basis


def _normalized(points: Sequence[Point], vec: dict[int, Fraction]) -> Witness:
    support = sorted(i for i, c in vec.items() if c)
    lead = vec[support[0]]
    w = Witness(tuple(points[i] for i in support), tuple(vec[i] / lead for i in support))
    return w.with_origin()


def witness_on(S: Sequence[Point], P: Polynomial, s: MapSystem) -> Optional[Witness]:
    """A witness supported in ``S``, or None if ``P|_S`` lies in the fiber span.

    One elimination decides membership; then among the first few nullspace
    basis vectors pairing nonzero with ``P|_S`` the one of smallest support is
    kept, so small witnesses such as unit squares come out directly.
    """
    S = [tuple(p) for p in S]
    ech = _fiber_echelon(S, s)
    values = [evaluate(P, p) for p in S]
    target = {i: v for i, v in enumerate(values) if v}
    if ech.contains(target):
        return None
    best = None
    found = 0
    for f in ech.free_columns(len(S)):
        vec = ech.null_vector(f)
        if sum(c * values[i] for i, c in vec.items()):
            found += 1
            if best is None or len(vec) < len(best):
                best = vec
            if found >= _SUPPORT_CANDIDATES:
                break
    return _normalized(S, best)


def find_witness(
    P: Polynomial, s: MapSystem, sched: SearchSchedule = SearchSchedule()
) -> WitnessFound | SearchExhausted:
    """Search cubes ``M * {-N..N}^d`` in schedule order; first success wins."""
    if P.dimension != s.domain_dim:
        raise DimensionError("phase and maps disagree on the domain dimension")
    tried = []
    for M in sched.modulus_sequence:
        for N in range(1, sched.max_radius + 1):
            S = cube(N, s.domain_dim, M)
            tried.append((M, N))
            w = witness_on(S, P, s)
            if w is not None:
                return WitnessFound(witness=w, radius=N, modulus=M, cube_size=len(S))
    return SearchExhausted(schedule=sched, largest_radius=sched.max_radius, cells_tried=tried)


def fiber_sums_vanish(w: Witness, s: MapSystem) -> bool:
    for m in s.maps:
        for idx in fiber_partition(m, w.points).groups.values():
            if sum(w.coeffs[i] for i in idx):
                return False
    return True


def verify_witness(w: Witness, P: Polynomial, s: MapSystem) -> bool:
    if not w.points or len(set(w.points)) != len(w.points):
        return False
    if w.dimension != P.dimension or w.dimension != s.domain_dim:
        return False
    return w.value(P) != 0 and fiber_sums_vanish(w, s)


def integerize(w: Witness) -> Witness:
    scale = reduce(math.lcm, (c.denominator for c in w.coeffs), 1)
    ints = [int(c * scale) for c in w.coeffs]
    g = reduce(math.gcd, ints, 0) or 1
    return Witness(w.points, tuple(Fraction(v // g) for v in ints))


def pattern_polynomial(P: Polynomial, w: Witness) -> Polynomial:
    """``h(y, r) = sum_s c_s P(y + r s)`` as a polynomial in ``(y_1..y_d, r)``."""
    d = P.dimension
    if w.dimension != d:
        raise DimensionError("witness and phase dimensions differ")
    w = w.with_origin()
    h = Polynomial.zero(d + 1)
    for p, c in zip(w.points, w.coeffs):
        if not c:
            continue
        # (y, r) -> y + r s
        L = [[int(i == k) for k in range(d)] + [p[i]] for i in range(d)]
        h = h + compose_linear(P, L) * c
    return h
