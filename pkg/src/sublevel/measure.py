"""Sublevel-set measurements on a box.

Estimates use a deterministic midpoint grid (or seeded Monte Carlo) and
count hits as integers, so results do not depend on summation order.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Optional, Sequence

import numpy as np

from .degeneracy import recompose
from .exactpoly import DimensionError, Polynomial, as_rational, evaluate
from .linmaps import MapSystem
from .witness import Witness, pattern_polynomial, verify_witness

Box = Sequence[tuple[Fraction, Fraction]]
TAU = 2 * math.pi

DEFAULT_EPSILONS = (Fraction(1, 10), Fraction(1, 100), Fraction(1, 1000), Fraction(1, 10000))
DEFAULT_RESOLUTION = 64


class LazyTable(Mapping):
    """Read-only mapping ``k -> fn(k)`` over the integer box ``lo <= k <= hi``, memoized."""

    def __init__(self, fn: Callable[[tuple[int, ...]], object], lo: Sequence[int], hi: Sequence[int]):
        self._fn = fn
        self._lo = tuple(lo)
        self._hi = tuple(hi)
        self._memo: dict = {}

    def __contains__(self, k) -> bool:
        return all(a <= v <= b for a, v, b in zip(self._lo, k, self._hi))

    def __getitem__(self, k):
        if k not in self:
            raise KeyError(k)
        if k not in self._memo:
            self._memo[k] = self._fn(k)
        return self._memo[k]

    def __iter__(self) -> Iterator:
        return iter(self._memo)

    def __len__(self) -> int:
        return math.prod(b - a + 1 for a, b in zip(self._lo, self._hi))


@dataclass(frozen=True)
class GridFunction:
    """Piecewise-constant function on ``R^{d_j}`` tabulated on ``pitch * Z^{d_j}``.

    The value at lattice index ``k`` (point ``pitch * k``) extends to the
    half-open cell ``pitch * k + [-cell/2, cell/2)^{d_j}``; outside every
    tabulated cell the function equals ``default``.
    """

    codomain_dim: int
    values: Mapping = None
    pitch: Fraction = Fraction(1)
    default: complex | float | Fraction = 0.0
    cell: Optional[Fraction] = None

    def __post_init__(self):
        object.__setattr__(self, "pitch", as_rational(self.pitch))
        if self.pitch <= 0:
            raise ValueError("pitch must be positive")
        cell = self.pitch if self.cell is None else as_rational(self.cell)
        if not 0 < cell <= self.pitch:
            raise ValueError("cell width must be in (0, pitch]")
        object.__setattr__(self, "cell", cell)
        if self.values is None:
            object.__setattr__(self, "values", {})

    @classmethod
    def constant(cls, value, codomain_dim: int) -> "GridFunction":
        return cls(codomain_dim, {}, Fraction(1), value)

    def index(self, z: Sequence) -> Optional[tuple[int, ...]]:
        """Lattice index of the cell containing ``z``, or None between cells."""
        if len(z) != self.codomain_dim:
            raise DimensionError(f"point has length {len(z)}, expected {self.codomain_dim}")
        exact = all(isinstance(v, (int, Fraction)) for v in z)
        half = self.cell / 2
        k = []
        for v in z:
            if exact:
                q = Fraction(v) / self.pitch
                ki = math.floor(q + Fraction(1, 2))
                off = Fraction(v) - ki * self.pitch
            else:
                q = float(v) / float(self.pitch)
                ki = math.floor(q + 0.5)
                off = float(v) - ki * float(self.pitch)
                half = float(self.cell) / 2
            if not -half <= off < half:
                return None
            k.append(ki)
        return tuple(k)

    def __call__(self, z: Sequence):
        k = self.index(z)
        if k is not None and k in self.values:
            return self.values[k]
        return self.default

    def evaluate_many(self, Z: np.ndarray) -> np.ndarray:
        Z = np.asarray(Z, dtype=float).reshape(len(Z), self.codomain_dim)
        if not self.values:
            return np.full(len(Z), complex(self.default) if isinstance(self.default, complex)
                           else float(self.default))
        pitch, half = float(self.pitch), float(self.cell) / 2
        K = np.floor(Z / pitch + 0.5)
        inside = np.all((Z - K * pitch >= -half) & (Z - K * pitch < half), axis=1)
        K = K.astype(np.int64)
        out = []
        default = self.default
        for row, ok in zip(K, inside):
            key = tuple(int(v) for v in row)
            out.append(self.values[key] if ok and key in self.values else default)
        if any(isinstance(v, complex) for v in out):
            return np.array(out, dtype=complex)
        return np.array([float(v) for v in out])


def evaluate_functions(fns, s: MapSystem, X: np.ndarray) -> list[np.ndarray]:
    """Values ``f_j(l_j(x))`` for each sample row of ``X``."""
    if len(fns) != len(s.maps):
        raise DimensionError(f"{len(fns)} functions for {len(s.maps)} maps")
    out = []
    for f, m in zip(fns, s.maps):
        L = np.array([[float(v) for v in row] for row in m.matrix])
        Z = X @ L.T
        if hasattr(f, "evaluate_many"):
            out.append(f.evaluate_many(Z))
        else:
            out.append(np.array([f(tuple(z)) for z in Z]))
    return out


def zero_functions(s: MapSystem) -> list[GridFunction]:
    return [GridFunction.constant(0.0, m.codomain_dim) for m in s.maps]


def box_volume(box: Box) -> Fraction:
    return math.prod((Fraction(hi) - Fraction(lo) for lo, hi in box), start=Fraction(1))


def grid_points(box: Box, resolution: int) -> np.ndarray:
    """Midpoints of the ``resolution^d`` congruent cells of ``box`` (row-major)."""
    axes = [
        float(lo) + (np.arange(resolution) + 0.5) * (float(hi) - float(lo)) / resolution
        for lo, hi in box
    ]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def exact_grid_points(box: Box, resolution: int) -> Iterator[tuple[Fraction, ...]]:
    from itertools import product

    axes = [
        [Fraction(lo) + (2 * i + 1) * (Fraction(hi) - Fraction(lo)) / (2 * resolution)
         for i in range(resolution)]
        for lo, hi in box
    ]
    return product(*axes)


def sample_points(box: Box, resolution: int, mode: str = "grid", seed: int = 0) -> np.ndarray:
    if resolution < 2:
        raise ValueError("resolution must be at least 2 samples per axis")
    if mode == "grid":
        return grid_points(box, resolution)
    if mode == "mc":
        rng = np.random.default_rng(seed)
        lo = np.array([float(a) for a, _ in box])
        hi = np.array([float(b) for _, b in box])
        return lo + rng.random((resolution ** len(box), len(box))) * (hi - lo)
    raise ValueError(f"unknown sampling mode {mode!r}")


@dataclass(frozen=True)
class SublevelReport:
    epsilon: Fraction
    lam: float
    box: tuple[tuple[Fraction, Fraction], ...]
    resolution: int
    estimated_measure: float
    sample_count: int
    hits: int
    mode: str

    @property
    def volume(self) -> float:
        return float(box_volume(self.box))

    @property
    def fraction(self) -> float:
        return self.hits / self.sample_count


def _check(P: Polynomial, s: MapSystem, box: Box) -> None:
    if P.dimension != s.domain_dim or len(box) != s.domain_dim:
        raise DimensionError("phase, maps and box must share the domain dimension")


def _report(hits, n, eps, lam, box, resolution, mode) -> SublevelReport:
    box = tuple((Fraction(lo), Fraction(hi)) for lo, hi in box)
    return SublevelReport(
        epsilon=as_rational(eps) if not isinstance(eps, float) else eps,
        lam=lam, box=box, resolution=resolution,
        estimated_measure=float(box_volume(box)) * hits / n,
        sample_count=n, hits=hits, mode=mode,
    )


def residual_values(P, s, fns, X) -> np.ndarray:
    vals = P.evaluate_array(X).astype(complex if _any_complex(fns) else float)
    for fv in evaluate_functions(fns, s, X):
        vals = vals - fv
    return vals


def _any_complex(fns) -> bool:
    return any(isinstance(getattr(f, "default", 0.0), complex) for f in fns)


def measure_sublevel(
    P: Polynomial,
    s: MapSystem,
    fns,
    epsilon,
    box: Box,
    resolution: int = DEFAULT_RESOLUTION,
    mode: str = "grid",
    seed: int = 0,
) -> SublevelReport:
    """Estimate ``|{y in B : |P(y) - sum f_j(l_j(y))| < eps}|``."""
    _check(P, s, box)
    eps = float(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    X = sample_points(box, resolution, mode, seed)
    hits = int(np.count_nonzero(np.abs(residual_values(P, s, fns, X)) < eps))
    return _report(hits, len(X), epsilon, 1.0, box, resolution, mode)


def circle_distance(y: np.ndarray) -> np.ndarray:
    """Distance to ``2 pi Z``."""
    return np.abs(y - TAU * np.round(y / TAU))


def measure_periodic_sublevel(
    P: Polynomial,
    s: MapSystem,
    fns,
    epsilon,
    lam: float,
    box: Box,
    resolution: int = DEFAULT_RESOLUTION,
    mode: str = "grid",
    seed: int = 0,
) -> SublevelReport:
    """Estimate ``|{y in B : dist(lam P(y) - sum f_j(l_j(y)), 2 pi Z) < eps}|``."""
    _check(P, s, box)
    lam = float(lam)
    eps = float(epsilon)
    if abs(lam) < 1:
        raise ValueError("periodic sublevel sets need |lambda| >= 1")
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    X = sample_points(box, resolution, mode, seed)
    vals = lam * P.evaluate_array(X)
    for fv in evaluate_functions(fns, s, X):
        vals = vals - np.real(fv)
    hits = int(np.count_nonzero(circle_distance(vals) < eps))
    return _report(hits, len(X), epsilon, lam, box, resolution, mode)


def gradient_bound(P: Polynomial, box: Box) -> Fraction:
    """Exact upper bound for ``sum_i sup_B |dP/dx_i|``."""
    radius = [max(abs(Fraction(lo)), abs(Fraction(hi))) for lo, hi in box]
    total = Fraction(0)
    for e, c in P.terms.items():
        for i, a in enumerate(e):
            if a:
                term = abs(c) * a
                for k, b in enumerate(e):
                    term *= radius[k] ** (b - 1 if k == i else b)
                total += term
    return total


def adversary_scale(P: Polynomial, epsilon, box: Box) -> Fraction:
    """Largest ``r = 2^-k <= 1`` with ``|P(x) - P(y)| <= eps/2`` once ``|x - y|_inf <= r/2``.

    The gradient bound is taken on ``box`` enlarged by 1 so it also covers
    lattice points just outside the box.
    """
    grown = [(Fraction(lo) - 1, Fraction(hi) + 1) for lo, hi in box]
    G = gradient_bound(P, grown)
    eps = as_rational(epsilon) if not isinstance(epsilon, float) else Fraction(epsilon)
    r = Fraction(1)
    while G * r / 2 > eps / 2:
        r /= 2
    return r


def degenerate_adversary(
    P: Polynomial, s: MapSystem, decomposition, epsilon, box: Box
) -> tuple[list[GridFunction], Fraction]:
    """Functions making ``E_eps`` large for a degenerate phase.

    With ``r`` from :func:`adversary_scale`, ``f_j`` is ``p_j`` sampled on the
    codomain lattice ``(r / m_j) Z^{d_j}`` containing ``l_j(r Z^d)``, where
    ``m_j`` clears the denominators of ``l_j``; cells tile the codomain. At
    every point ``y`` of ``r Z^d``, ``P(y) = sum f_j(l_j(y))`` exactly.
    """
    if len(decomposition) != len(s.maps) or recompose(decomposition, s) != P:
        raise ValueError("decomposition does not represent P")
    _check(P, s, box)
    r = adversary_scale(P, epsilon, box)
    rho = max(s.operator_norm_bound, Fraction(1))
    fns = []
    for p, m in zip(decomposition, s.maps):
        scale = math.lcm(*(v.denominator for row in m.matrix for v in row))
        pitch = r / scale
        # codomain box covering l_j(B grown by r)
        reach = [max(abs(Fraction(lo)), abs(Fraction(hi))) + r for lo, hi in box]
        bound = [sum(abs(v) * R for v, R in zip(row, reach)) for row in m.matrix]
        hi = [math.ceil(b / pitch) for b in bound]
        lo = [-h for h in hi]
        table = LazyTable(lambda k, p=p, pitch=pitch: evaluate(p, [pitch * a for a in k]), lo, hi)
        fns.append(GridFunction(m.codomain_dim, table, pitch, default=float(rho) * 1e6))
    return fns, r


def circle_sublevel_measure(phi, delta: float, samples: int = 4097) -> float:
    """``|{t in [0,1] : dist(phi(t), 2 pi Z) <= delta}|`` for increasing ``phi``.

    ``phi`` is a callable (sampled at ``samples`` equispaced points) or a pair
    ``(t, values)``. The measure of the piecewise-linear interpolant is
    computed exactly: sample values are converted to rationals and each
    window ``[2 pi m - delta, 2 pi m + delta]`` is pulled back per piece.
    """
    if callable(phi):
        t = np.linspace(0.0, 1.0, samples)
        v = np.array([float(phi(x)) for x in t])
    else:
        t, v = (np.asarray(a, dtype=float) for a in phi)
    if len(t) < 2 or len(t) != len(v):
        raise ValueError("need at least two (t, phi) samples")
    if np.any(np.diff(t) <= 0) or np.any(np.diff(v) <= 0):
        raise ValueError("phi must be sampled on increasing t and be strictly increasing")
    if not 0 < delta <= 0.5:
        raise ValueError("delta must lie in (0, 1/2]")
    d = Fraction(delta)
    tau = Fraction(TAU)
    total = Fraction(0)
    for k in range(len(t) - 1):
        a, b = v[k], v[k + 1]
        m_lo = math.ceil((a - delta) / TAU) - 1
        m_hi = math.floor((b + delta) / TAU) + 1
        if not any(abs(a - TAU * m) <= delta + 1e-9 or abs(b - TAU * m) <= delta + 1e-9
                   or a < TAU * m < b for m in range(m_lo, m_hi + 1)):
            continue
        fa, fb, t0, t1 = Fraction(a), Fraction(b), Fraction(t[k]), Fraction(t[k + 1])
        slope = (t1 - t0) / (fb - fa)
        for m in range(m_lo, m_hi + 1):
            lo = max(fa, tau * m - d)
            hi = min(fb, tau * m + d)
            if hi > lo:
                total += (hi - lo) * slope
    return float(total)


@dataclass(frozen=True)
class ExclusionCheck:
    contained: bool
    h_value: Fraction
    bound: Fraction

    @property
    def violation(self) -> bool:
        return self.contained and abs(self.h_value) > self.bound


def exclusion_check(
    h: Polynomial, P: Polynomial, s: MapSystem, w: Witness, fns, epsilon, box: Box, x, r
) -> ExclusionCheck:
    """Exact check of one pair ``(x, r)``: is ``x + rS`` inside ``E_eps``?"""
    eps = Fraction(epsilon)
    x = [Fraction(v) for v in x]
    r = Fraction(r)
    inside = True
    for p in w.points:
        y = [xi + r * si for xi, si in zip(x, p)]
        if not all(Fraction(lo) <= yi <= Fraction(hi) for yi, (lo, hi) in zip(y, box)):
            inside = False
            break
        value = evaluate(P, y)
        for f, m in zip(fns, s.maps):
            value -= Fraction(f(m(y)))
        if not abs(value) < eps:
            inside = False
            break
    return ExclusionCheck(inside, evaluate(h, x + [r]), w.l1_norm * eps)


def pattern_exclusion_scan(
    P: Polynomial,
    s: MapSystem,
    w: Witness,
    fns,
    epsilon,
    box: Box,
    resolution: int,
    r_grid: Sequence,
) -> list[tuple[tuple[Fraction, ...], Fraction]]:
    """Pairs ``(x, r)`` with ``x + rS`` in ``E_eps`` yet ``|h(x, r)| > sum|c_s| eps``.

    Evaluation is exact (sample points and ``r`` are rationals, function
    values are converted exactly), so the expected result is always empty.
    """
    _check(P, s, box)
    if not w.is_integer or not verify_witness(w, P, s):
        raise ValueError("pattern_exclusion_scan needs a verifying integer witness")
    h = pattern_polynomial(P, w)
    violations = []
    for x in exact_grid_points(box, resolution):
        for r in r_grid:
            chk = exclusion_check(h, P, s, w, fns, epsilon, box, x, r)
            if chk.violation:
                violations.append((tuple(x), Fraction(r)))
    return violations
