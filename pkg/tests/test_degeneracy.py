import pytest
from hypothesis import given, strategies as st

from conftest import nonzero_vectors, polynomials
from sublevel import corpus
from sublevel.degeneracy import annihilator_test, decide_degeneracy, recompose
from sublevel.exactpoly import DimensionError, Polynomial, compose_linear
from sublevel.linmaps import LinearMap, MapSystem

x1, x2 = Polynomial.variables(2)
y1, y2, y3 = Polynomial.variables(3)
coords2 = MapSystem.from_rows((1, 0), (0, 1))


def test_bilinear_is_nondegenerate():
    v = decide_degeneracy(x1 * x2, coords2)
    assert not v.degenerate
    assert v.certificate.monomial == (1, 1)
    assert v.certificate.rank_deficit == 1


def test_separable_decomposes():
    v = decide_degeneracy(x1 + x2**2, coords2)
    assert v.degenerate
    assert recompose(v.decomposition, coords2) == x1 + x2**2


def test_quadratic_with_three_directions_is_degenerate():
    s = MapSystem.from_rows((1, 0), (0, 1), (1, 1))
    v = decide_degeneracy(x1 * x2, s)
    assert v.degenerate and recompose(v.decomposition, s) == x1 * x2


def test_trilinear_with_pair_projections():
    s = MapSystem.of(*(LinearMap.coordinates(p, 3) for p in [(0, 1), (1, 2), (0, 2)]))
    assert not decide_degeneracy(y1 * y2 * y3, s).degenerate
    assert decide_degeneracy(y1 * y2 + y2 * y3**2, s).degenerate


def test_invertible_map_makes_everything_degenerate():
    s = MapSystem.of(LinearMap([[1, 1], [0, 1]]), LinearMap([[1, 0]]))
    v = decide_degeneracy(x1 * x2**3, s)
    assert v.degenerate and recompose(v.decomposition, s) == x1 * x2**3
    with pytest.raises(ValueError):
        annihilator_test(x1 * x2, s)


def test_zero_and_no_maps():
    assert decide_degeneracy(Polynomial.zero(2), coords2).degenerate
    # zero is the empty sum
    assert decide_degeneracy(Polynomial.zero(2), MapSystem(2)).decomposition == ()
    assert not decide_degeneracy(x1, MapSystem(2)).degenerate


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        decide_degeneracy(y1, coords2)


def test_annihilator_on_bilinear():
    ann = annihilator_test(x1 * x2, coords2)
    assert str(ann.operator) == "D_{e2}D_{e1}"
    assert ann.image == Polynomial.constant(1, 2)
    assert annihilator_test(x1**2 + x2**5, coords2) is None


def test_cone_phase_escapes_annihilator():
    # five first-order differences kill every quadratic, yet the phase is nondegenerate
    prob = corpus.load("cone5")
    assert annihilator_test(prob.phase, prob.maps) is None
    assert not decide_degeneracy(prob.phase, prob.maps).degenerate


@given(st.data())
def test_random_pullback_sums_are_degenerate(data):
    rows = [data.draw(nonzero_vectors(2)) for _ in range(3)]
    s = MapSystem.from_rows(*rows)
    parts = [data.draw(polynomials(1, max_degree=3)) for _ in rows]
    P = sum((compose_linear(p, [r]) for p, r in zip(parts, rows)), Polynomial.zero(2))
    v = decide_degeneracy(P, s)
    assert v.degenerate
    assert recompose(v.decomposition, s) == P
    assert all(p.is_zero() or p.degree <= max(P.degree, 0) for p in v.decomposition)


@given(polynomials(2, max_degree=3))
def test_annihilator_success_implies_nondegenerate(P):
    ann = annihilator_test(P, coords2)
    if ann is not None:
        assert not decide_degeneracy(P, coords2).degenerate


@given(polynomials(2, max_degree=3))
def test_certificate_residual_is_outside_span(P):
    v = decide_degeneracy(P, coords2)
    if v.degenerate:
        return
    res = v.certificate.residual
    assert res.coefficient(v.certificate.monomial) != 0
    assert not decide_degeneracy(res, coords2).degenerate
