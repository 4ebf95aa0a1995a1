"""Tensor-grid quadrature for ``I = int e^{i lam P(y)} prod f_j(l_j(y)) eta(y) dy``."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .degeneracy import recompose
from .exactpoly import DimensionError, Polynomial, evaluate
from .linmaps import MapSystem
from .measure import Box, GridFunction, LazyTable, adversary_scale, evaluate_functions, gradient_bound

#: Grid points per oscillation period demanded by the resolution guard.
POINTS_PER_PERIOD = 8
MIN_RESOLUTION = 64
#: Largest tensor grid evaluated in one call, and the slab size used for it.
MAX_CELLS = 2**26
CHUNK = 2**20


class ResolutionTooLow(ValueError):
    def __init__(self, given: int, required: int):
        super().__init__(f"resolution {given} is below the required {required} points per axis")
        self.given = given
        self.required = required


@dataclass(frozen=True)
class CutoffSpec:
    """Bump ``prod_i (1 - t_i^2)^2`` with ``t`` the affine image of ``B`` onto ``[-1, 1]^d``."""

    box: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        box = tuple((Fraction(lo), Fraction(hi)) for lo, hi in self.box)
        if any(lo >= hi for lo, hi in box):
            raise ValueError("box sides must be nonempty intervals")
        object.__setattr__(self, "box", box)

    @property
    def dimension(self) -> int:
        return len(self.box)

    def _t(self, i, y):
        lo, hi = self.box[i]
        return (2 * y - (lo + hi)) / (hi - lo)

    def exact(self, y: Sequence) -> Fraction:
        out = Fraction(1)
        for i, v in enumerate(y):
            t = self._t(i, Fraction(v))
            out *= (1 - t * t) ** 2 if abs(t) <= 1 else 0
        return out

    def profile(self, i: int, y: np.ndarray) -> np.ndarray:
        lo, hi = (float(v) for v in self.box[i])
        t = (2 * y - (lo + hi)) / (hi - lo)
        return np.where(np.abs(t) <= 1, (1 - t * t) ** 2, 0.0)

    def __call__(self, Y: np.ndarray) -> np.ndarray:
        Y = np.atleast_2d(Y)
        out = np.ones(len(Y))
        for i in range(self.dimension):
            out *= self.profile(i, Y[:, i])
        return out


def required_resolution(P: Polynomial, box: Box, lam: float) -> int:
    """max(64, 8 lam diam(B) max|grad P| / 2 pi), with an exact gradient bound."""
    diam = math.sqrt(sum(float(hi - lo) ** 2 for lo, hi in box))
    G = float(gradient_bound(P, box))
    return max(MIN_RESOLUTION, math.ceil(POINTS_PER_PERIOD * abs(lam) * diam * G / (2 * math.pi)))


def _axes(box: Box, resolution: int) -> list[np.ndarray]:
    return [
        float(lo) + (np.arange(resolution) + 0.5) * (float(hi) - float(lo)) / resolution
        for lo, hi in box
    ]


def _cell_volume(box: Box, resolution: int) -> float:
    return math.prod(float(hi - lo) / resolution for lo, hi in box)


def _slabs(box: Box, resolution: int):
    """Grid points in row-major slabs of at most ``CHUNK`` points."""
    axes = _axes(box, resolution)
    inner = resolution ** (len(box) - 1)
    step = max(1, CHUNK // inner)
    for start in range(0, resolution, step):
        mesh = np.meshgrid(axes[0][start:start + step], *axes[1:], indexing="ij")
        yield np.stack([m.ravel() for m in mesh], axis=1)


def _check_cells(resolution: int, d: int) -> None:
    if resolution**d > MAX_CELLS:
        raise ValueError(f"{resolution}^{d} grid cells exceed the quadrature cap {MAX_CELLS}")


def oscillatory_integral(
    P: Polynomial,
    s: MapSystem,
    fns,
    eta: CutoffSpec,
    lam: float,
    resolution: Optional[int] = None,
) -> complex:
    """Midpoint-rule estimate on ``resolution^d`` cells of ``eta.box``.

    ``resolution=None`` uses the guard minimum; anything lower raises
    :class:`ResolutionTooLow`. ``fns`` may be None for ``f_j = 1``.
    """
    if P.dimension != s.domain_dim or eta.dimension != s.domain_dim:
        raise DimensionError("phase, maps and cutoff must share the domain dimension")
    need = required_resolution(P, eta.box, lam)
    if resolution is None:
        resolution = need
    if resolution < need:
        raise ResolutionTooLow(resolution, need)
    _check_cells(resolution, eta.dimension)
    total = 0j
    for Y in _slabs(eta.box, resolution):
        vals = eta(Y).astype(complex)
        if lam:
            vals *= np.exp(1j * float(lam) * P.evaluate_array(Y))
        if fns is not None:
            for fv in evaluate_functions(fns, s, Y):
                vals *= fv
        total += complex(np.sum(vals))
    return total * _cell_volume(eta.box, resolution)


def cutoff_integral(eta: CutoffSpec, resolution: int) -> float:
    """``int eta`` on the same midpoint grid, computed axis by axis."""
    axes = _axes(eta.box, resolution)
    return math.prod(
        float(np.sum(eta.profile(i, a))) * float(hi - lo) / resolution
        for i, (a, (lo, hi)) in enumerate(zip(axes, eta.box))
    )


@dataclass(frozen=True)
class DecayRow:
    lam: float
    magnitude: float
    resolution: int


@dataclass(frozen=True)
class DecayCurve:
    rows: tuple[DecayRow, ...]
    #: NaN when fewer than two frequencies lie in the top decade
    fitted_slope: float


def fit_slope(lams: Sequence[float], mags: Sequence[float]) -> float:
    """Least-squares slope of ``log|I|`` against ``log lam`` over the top decade."""
    top = max(lams)
    pts = [(math.log(l), math.log(m)) for l, m in zip(lams, mags) if l >= top / 10]
    if len(pts) < 2:
        raise ValueError("need at least two frequencies in the top decade")
    if any(not math.isfinite(y) for _, y in pts):
        return -math.inf
    xs, ys = zip(*pts)
    return float(np.polyfit(xs, ys, 1)[0])


def decay_curve(
    P: Polynomial,
    s: MapSystem,
    fns,
    eta: CutoffSpec,
    lams: Sequence[float],
    resolution_policy: Optional[Callable[[float], int]] = None,
) -> DecayCurve:
    """``|I_lam|`` over increasing ``lams >= 1``.

    ``fns`` is a list of functions, or a callable ``lam -> list`` for
    frequency-dependent inputs. Without a policy each row uses the guard.
    """
    lams = [float(l) for l in lams]
    if any(l < 1 for l in lams) or any(b <= a for a, b in zip(lams, lams[1:])):
        raise ValueError("frequencies must be increasing and >= 1")
    policy = resolution_policy or (lambda lam: required_resolution(P, eta.box, lam))
    plan = [(lam, policy(lam)) for lam in lams]
    for _, res in plan:
        _check_cells(res, eta.dimension)
    rows = []
    for lam, res in plan:
        f = fns(lam) if callable(fns) else fns
        rows.append(DecayRow(lam, abs(oscillatory_integral(P, s, f, eta, lam, res)), res))
    top = [r for r in rows if r.lam >= lams[-1] / 10]
    slope = fit_slope(lams, [r.magnitude for r in rows]) if len(top) > 1 else math.nan
    return DecayCurve(tuple(rows), slope)


def cancelling_functions(
    P: Polynomial, s: MapSystem, decomposition, lam: float, box: Box, tolerance: float = 0.05
) -> list[GridFunction]:
    """``f_j = e^{-i lam p_j}`` tabulated on a lattice fine enough that the
    integrand stays within ``tolerance`` of ``eta``; ``decomposition`` must
    represent ``P``.
    """
    if recompose(decomposition, s) != P:
        raise ValueError("decomposition does not represent P")
    r = adversary_scale(P, Fraction(tolerance) / max(1, math.ceil(abs(lam))), box)
    grown = [max(abs(Fraction(lo)), abs(Fraction(hi))) + r for lo, hi in box]
    fns = []
    for p, m in zip(decomposition, s.maps):
        scale = math.lcm(*(v.denominator for row in m.matrix for v in row))
        pitch = r / scale
        hi = [math.ceil(sum(abs(v) * R for v, R in zip(row, grown)) / pitch) for row in m.matrix]
        table = LazyTable(
            lambda k, p=p, pitch=pitch: cmath.exp(-1j * lam * float(evaluate(p, [pitch * a for a in k]))),
            [-h for h in hi], hi,
        )
        fns.append(GridFunction(m.codomain_dim, table, pitch, default=0j))
    return fns
