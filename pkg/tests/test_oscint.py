import math
from fractions import Fraction

import numpy as np
import pytest

from sublevel import corpus
from sublevel.degeneracy import decide_degeneracy
from sublevel.exactpoly import Polynomial
from sublevel.linmaps import MapSystem
from sublevel.measure import GridFunction
from sublevel.oscint import (
    CutoffSpec,
    ResolutionTooLow,
    cancelling_functions,
    cutoff_integral,
    decay_curve,
    fit_slope,
    oscillatory_integral,
    required_resolution,
)

F = Fraction
x1, x2 = Polynomial.variables(2)
coords2 = MapSystem.from_rows((1, 0), (0, 1))
square = ((F(-1), F(1)), (F(-1), F(1)))
eta2 = CutoffSpec(square)
LAMS = [2.0**k for k in range(8)]


def ones(s):
    return [GridFunction.constant(1.0, m.codomain_dim) for m in s.maps]


def test_cutoff_profile():
    eta = CutoffSpec(((F(0), F(2)),))
    assert eta.exact([1]) == 1 and eta.exact([0]) == 0 and eta.exact([F(3, 2)]) == F(9, 16)
    assert eta.exact([3]) == 0
    assert np.allclose(eta(np.array([[1.0], [1.5], [2.5]])), [1, 9 / 16, 0])
    # int_{-1}^{1} (1 - t^2)^2 dt = 16/15
    assert cutoff_integral(eta2, 4096) == pytest.approx((16 / 15) ** 2, rel=1e-6)


def test_zero_frequency_matches_direct_quadrature():
    est = oscillatory_integral(x1 * x2, coords2, ones(coords2), eta2, 0, 64)
    ref = cutoff_integral(eta2, 64)
    assert est.imag == 0
    assert abs(est.real - ref) <= 1e-10 * ref


def test_zero_frequency_with_tabulated_functions():
    # fns depend on one coordinate each, so the integral factorizes on the grid
    g = GridFunction(1, {(k,): 1 + k / 10 for k in range(-4, 5)}, F(1, 4), default=0.0)
    est = oscillatory_integral(x1 * x2, coords2, [g, g], eta2, 0, 64)
    t = -1 + (np.arange(64) + 0.5) / 32
    axis = sum(g((v,)) * (1 - v * v) ** 2 for v in t) / 32
    assert abs(est.real - axis**2) <= 1e-10 * axis**2


def test_constant_phase_is_independent_of_lambda():
    zero = Polynomial.zero(2)
    vals = [oscillatory_integral(zero, coords2, None, eta2, lam, 64) for lam in (0, 3, 50)]
    assert vals[0] == vals[1] == vals[2]


def test_conjugation_symmetry():
    P = x1**3 + x1 * x2 + 2 * x2
    a = oscillatory_integral(P, coords2, None, eta2, 5.0, 128)
    b = oscillatory_integral(P, coords2, None, eta2, -5.0, 128)
    assert a.imag != 0
    assert b == a.conjugate()


def test_modulus_bound():
    P = x1**2 - x2
    g = GridFunction.constant(0.7, 1)
    val = oscillatory_integral(P, coords2, [g, g], eta2, 9.0)
    assert abs(val) <= cutoff_integral(eta2, required_resolution(P, square, 9.0)) * 0.49 + 1e-12


def test_resolution_guard():
    need = required_resolution(x1 * x2, square, 128)
    assert need == math.ceil(8 * 128 * math.sqrt(8) * 2 / (2 * math.pi))
    with pytest.raises(ResolutionTooLow) as exc:
        oscillatory_integral(x1 * x2, coords2, None, eta2, 128, need - 1)
    assert exc.value.required == need
    assert required_resolution(x1 * x2, square, 1) == 64


def test_bilinear_decay_slope():
    curve = decay_curve(x1 * x2, coords2, None, eta2, LAMS)
    assert -1.2 <= curve.fitted_slope <= -0.8
    assert [r.lam for r in curve.rows] == LAMS
    assert all(r.resolution >= required_resolution(x1 * x2, square, r.lam) for r in curve.rows)


def test_constant_phase_slope():
    curve = decay_curve(Polynomial.zero(2), coords2, None, eta2, LAMS)
    assert abs(curve.fitted_slope) <= 0.05


def test_stationary_phase_in_one_dimension():
    P = Polynomial(1, {(2,): 1})
    eta = CutoffSpec(((F(-1), F(1)),))
    curve = decay_curve(P, MapSystem(1), None, eta, [2.0**k for k in range(6, 12)])
    assert curve.fitted_slope == pytest.approx(-0.5, abs=0.02)
    # leading term sqrt(pi / lam) * eta(0)
    lam = curve.rows[-1].lam
    assert curve.rows[-1].magnitude == pytest.approx(math.sqrt(math.pi / lam), rel=0.02)


def test_cancelling_functions_stop_decay():
    prob = corpus.load("separable")
    v = decide_degeneracy(prob.phase, prob.maps)
    lams = [1.0, 2.0, 4.0, 8.0, 16.0]
    curve = decay_curve(prob.phase, prob.maps,
                        lambda lam: cancelling_functions(prob.phase, prob.maps, v.decomposition, lam, square),
                        eta2, lams)
    c0 = cutoff_integral(eta2, 64)
    assert all(abs(r.magnitude - c0) <= 0.05 * c0 for r in curve.rows)
    assert abs(curve.fitted_slope) <= 0.05


def test_decay_curve_input_checks():
    with pytest.raises(ValueError):
        decay_curve(x1 * x2, coords2, None, eta2, [0.5, 2])
    with pytest.raises(ValueError):
        decay_curve(x1 * x2, coords2, None, eta2, [4, 2])
    assert fit_slope([1, 10, 100], [1, 0.1, 0.01]) == pytest.approx(-1)


def test_grid_cap_and_single_frequency():
    eta3 = CutoffSpec(square + ((F(-1), F(1)),))
    P = Polynomial(3, {(0, 0, 2): 1})
    with pytest.raises(ValueError, match="quadrature cap"):
        decay_curve(P, MapSystem(3), None, eta3, [1.0, 4096.0])
    curve = decay_curve(x1 * x2, coords2, None, eta2, [3.0])
    assert math.isnan(curve.fitted_slope) and len(curve.rows) == 1
