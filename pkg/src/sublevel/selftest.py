"""Fast invariant checks run by ``sublevel selftest``."""

from __future__ import annotations

import math
import random
from fractions import Fraction
from typing import Callable

from . import corpus
from .degeneracy import decide_degeneracy, recompose
from .density import density_curve
from .exactpoly import DifferenceOperator, Polynomial, apply_operator, compose_linear, difference, shift
from .measure import GridFunction, measure_periodic_sublevel
from .oscint import CutoffSpec, cutoff_integral, oscillatory_integral
from .witness import find_witness, verify_witness

# fixtures whose exhaustive search takes seconds
SLOW = {"cone5_degenerate", "pairwise_degenerate"}


def random_polynomial(rng: random.Random, d: int, deg: int, terms: int = 4) -> Polynomial:
    out = {}
    for _ in range(terms):
        e = [0] * d
        for _ in range(rng.randint(0, deg)):
            e[rng.randrange(d)] += 1
        out[tuple(e)] = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
    return Polynomial(d, out)


def random_vector(rng: random.Random, d: int, lo: int = -3, hi: int = 3) -> tuple[int, ...]:
    return tuple(rng.randint(lo, hi) for _ in range(d))


def check_pushforward(count: int = 200, seed: int = 1) -> bool:
    rng = random.Random(seed)
    for _ in range(count):
        d, m = rng.randint(1, 3), rng.randint(1, 3)
        f = random_polynomial(rng, m, rng.randint(0, 4))
        L = [random_vector(rng, d) for _ in range(m)]
        y = random_vector(rng, d)
        Ly = [sum(a * b for a, b in zip(row, y)) for row in L]
        if difference(compose_linear(f, L), y) != compose_linear(difference(f, Ly), L):
            return False
    return True


def check_leibniz(count: int = 200, seed: int = 2) -> bool:
    rng = random.Random(seed)
    for _ in range(count):
        d = rng.randint(1, 3)
        f, g = (random_polynomial(rng, d, rng.randint(0, 4)) for _ in range(2))
        v = random_vector(rng, d)
        if difference(f * g, v) != difference(f, v) * g + shift(f, v) * difference(g, v):
            return False
    return True


def check_fixture_agreement(include_slow: bool = False) -> bool:
    for name in corpus.phase_names():
        if name in SLOW and not include_slow:
            continue
        prob = corpus.load(name)
        verdict = decide_degeneracy(prob.phase, prob.maps)
        found = find_witness(prob.phase, prob.maps)
        if verdict.degenerate:
            if hasattr(found, "witness") or recompose(verdict.decomposition, prob.maps) != prob.phase:
                return False
        elif not (hasattr(found, "witness") and verify_witness(found.witness, prob.phase, prob.maps)):
            return False
    return True


def check_density() -> bool:
    sizes = [row.max_size for row in density_curve([[0], [1], [2]], range(1, 10))]
    corner = density_curve([[0, 0], [1, 0], [0, 1]], [2])[0].max_size
    return sizes == [1, 2, 2, 3, 4, 4, 4, 4, 5] and corner == 3


def check_periodic() -> bool:
    prob = corpus.load("linear_no_maps")
    rep = measure_periodic_sublevel(
        prob.phase, prob.maps, [], Fraction(1, 10), 2 * math.pi, prob.box_or_default(), 512
    )
    return abs(rep.estimated_measure - 0.1 / math.pi) <= 2 / 512


def check_zero_frequency() -> bool:
    prob = corpus.load("bilinear_xy")
    eta = CutoffSpec(prob.box_or_default())
    ones = [GridFunction.constant(1.0, m.codomain_dim) for m in prob.maps]
    est = oscillatory_integral(prob.phase, prob.maps, ones, eta, 0, 64)
    ref = cutoff_integral(eta, 64)
    return abs(est - ref) <= 1e-10 * abs(ref)


def check_annihilation() -> bool:
    op = DifferenceOperator.of((0, 1), (1, 0))
    x1, x2 = Polynomial.variables(2)
    return apply_operator(op, x1 ** 3 + x2 ** 2 - 7).is_zero() and not apply_operator(op, x1 * x2).is_zero()


CHECKS: dict[str, Callable[[], bool]] = {
    "pushforward identity": check_pushforward,
    "leibniz rule": check_leibniz,
    "kernel annihilation": check_annihilation,
    "degeneracy vs witness search": check_fixture_agreement,
    "density 3-AP and corner": check_density,
    "periodic closed form": check_periodic,
    "zero-frequency quadrature": check_zero_frequency,
}


def run(emit=print) -> bool:
    ok = True
    for name, check in CHECKS.items():
        try:
            passed = bool(check())
        except Exception as exc:  # report and keep going
            passed = False
            name = f"{name} ({type(exc).__name__}: {exc})"
        ok &= passed
        emit(f"{'PASS' if passed else 'FAIL'} {name}")
    return ok
