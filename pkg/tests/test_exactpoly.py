from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import matrices, nonzero_vectors, polynomials, rationals, vectors
from sublevel.exactpoly import (
    NEG_INF,
    DifferenceOperator,
    DimensionError,
    Polynomial,
    apply_operator,
    as_rational,
    compose_linear,
    difference,
    evaluate,
    monomials_up_to,
    shift,
)
from sublevel.linalg import rank

x1, x2 = Polynomial.variables(2)


def test_arithmetic_basics():
    p = (x1 + x2) ** 2
    assert p == x1 * x1 + 2 * x1 * x2 + x2 * x2
    assert p - p == Polynomial.zero(2)
    assert (p / 2).coefficient((1, 1)) == 1
    assert p.degree == 2
    assert Polynomial.zero(2).degree == NEG_INF
    assert str(x1 * x2 - 3) == "x1*x2 - 3"


def test_coefficients_are_canonical():
    p = Polynomial(1, {(1,): Fraction(2, 4), (0,): 0})
    assert p.terms == {(1,): Fraction(1, 2)}
    assert hash(p) == hash(Polynomial(1, {(1,): Fraction(1, 2)}))


def test_rejects_floats_and_mixed_dimensions():
    with pytest.raises(TypeError):
        as_rational(0.5)
    with pytest.raises(DimensionError):
        x1 + Polynomial.variable(0, 3)


def test_difference_examples():
    assert difference(x1 * x2, (0, 1)) == x1
    assert apply_operator(DifferenceOperator.of((1, 0), (0, 1)), x1 * x2) == Polynomial.constant(1, 2)
    assert apply_operator(DifferenceOperator.of((0, 1), (1, 0)), x1**3 + x2**2).is_zero()


def test_operator_formatting_and_merging():
    op = DifferenceOperator.of((0, 1), (1, 0), (0, 1))
    assert str(op) == "D_{e2}^2D_{e1}"
    assert op.total_multiplicity == 3
    assert str(DifferenceOperator.of((1, -1))) == "D_{(1,-1)}"
    with pytest.raises(ValueError):
        DifferenceOperator.of((0, 0))


def test_monomial_order():
    assert monomials_up_to(2, 2) == [(2, 0), (1, 1), (0, 2), (1, 0), (0, 1), (0, 0)]
    assert monomials_up_to(3, -1) == []


def test_evaluate_array_matches_exact():
    p = x1**3 * x2 - Fraction(1, 3) * x2 + 2
    pts = [(Fraction(1, 2), Fraction(-3, 4)), (2, 5), (0, 0)]
    exact = [float(evaluate(p, q)) for q in pts]
    assert np.allclose(p.evaluate_array(np.array(pts, dtype=float)), exact)


@given(polynomials(2), vectors(2, rationals), vectors(2, rationals))
def test_shift_composes(p, a, b):
    ab = tuple(u + v for u, v in zip(a, b))
    assert shift(shift(p, a), b) == shift(p, ab)


@given(st.data())
def test_pushforward_identity(data):
    d = data.draw(st.integers(1, 3))
    m = data.draw(st.integers(1, 3))
    f = data.draw(polynomials(m))
    L = data.draw(matrices(m, d))
    y = data.draw(vectors(d))
    Ly = [sum(a * b for a, b in zip(row, y)) for row in L]
    assert difference(compose_linear(f, L), y) == compose_linear(difference(f, Ly), L)


@given(st.data())
def test_leibniz_rule(data):
    d = data.draw(st.integers(1, 3))
    f, g = data.draw(polynomials(d)), data.draw(polynomials(d))
    v = data.draw(vectors(d))
    assert difference(f * g, v) == difference(f, v) * g + shift(f, v) * difference(g, v)


@given(polynomials(2), nonzero_vectors(2), nonzero_vectors(2))
def test_difference_operators_commute(p, u, v):
    assert difference(difference(p, u), v) == difference(difference(p, v), u)


@given(polynomials(3), nonzero_vectors(3))
def test_difference_drops_degree(p, v):
    q = difference(p, v)
    assert q.is_zero() or q.degree <= p.degree - 1


@given(st.data())
def test_operator_kills_pullbacks(data):
    # D_u annihilates f o l whenever u spans ker l
    f = data.draw(polynomials(1, max_degree=5))
    row = data.draw(nonzero_vectors(2))
    u = (-row[1], row[0])
    assert difference(compose_linear(f, [row]), u).is_zero()


@given(polynomials(2, max_degree=3), vectors(2, rationals))
def test_evaluate_is_a_ring_map(p, x):
    q = p * p + 3 * p
    assert evaluate(q, x) == evaluate(p, x) ** 2 + 3 * evaluate(p, x)


@pytest.mark.parametrize("d,D", [(1, 4), (2, 3), (3, 2)])
def test_grid_evaluation_has_full_rank(d, D):
    # a polynomial of degree <= D vanishing on {0..D}^d is zero
    basis = monomials_up_to(d, D)
    grid = list(product(range(D + 1), repeat=d))
    rows = [[evaluate(Polynomial(d, {e: 1}), g) for e in basis] for g in grid]
    assert rank(rows) == len(basis)
