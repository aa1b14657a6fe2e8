import math

import numpy as np
import pytest

from spindlekit.errors import EpsilonTooLarge, OutOfRange
from spindlekit.smoothing import (
    TipProfile,
    calibrate_budget_constant,
    curvature_budget,
    sign_conditions,
    smooth_tip,
    smoothed_curvature,
    smoothed_surface_area,
    smoothing_coeffs,
    tip_curvature_mass,
    tip_profile_derivatives,
    tip_profile_w,
    total_curvature_smoothed,
)

GRID = [(a, e) for a in (0.25, 0.5, 0.75, 0.9) for e in (1e-2, 1e-3)]


def test_tip_profile_vanishes_at_tip_and_has_cone_slope():
    for a in (0.3, 0.7):
        assert tip_profile_w(a, 0.0) == pytest.approx(0.0, abs=1e-14)
        rho = 1e-6
        assert tip_profile_w(a, rho) / rho == pytest.approx(TipProfile(a).slope_at_tip, rel=1e-5)


def test_derivatives_match_finite_differences():
    a, rho, h = 0.6, 0.2, 1e-5
    w1, w2 = tip_profile_derivatives(a, rho)
    f = lambda r: tip_profile_w(a, r)
    assert w1 == pytest.approx((f(rho + h) - f(rho - h)) / (2 * h), rel=1e-8)
    assert w2 == pytest.approx((f(rho + h) - 2 * f(rho) + f(rho - h)) / h**2, rel=1e-4)


@pytest.mark.parametrize("a,eps", GRID)
def test_c2_matching_and_signs(a, eps):
    s = smooth_tip(a, eps)
    assert max(s.matching_residuals) <= 1e-9
    assert s.b1 > 0 > s.b2
    assert float(smoothed_curvature(s, eps)) == pytest.approx(1.0, abs=1e-6)
    rep = sign_conditions(s, n=10_000)
    assert rep.ok, rep.first_violation


def test_coefficients_solve_matching_system():
    a, eps = 0.5, 1e-2
    b0, b1, b2 = smoothing_coeffs(a, eps)
    M = np.array([[1, eps**2, eps**4], [0, 2 * eps, 4 * eps**3], [0, 2, 12 * eps**2]])
    rhs = np.array([tip_profile_w(a, eps), *tip_profile_derivatives(a, eps)])
    assert np.allclose(M @ [b0, b1, b2], rhs, rtol=1e-12, atol=1e-15)


@pytest.mark.parametrize("a,eps", GRID)
def test_gauss_bonnet_total(a, eps):
    assert total_curvature_smoothed(a, eps) == pytest.approx(4 * math.pi, rel=1e-10)


@pytest.mark.parametrize("a,eps", GRID)
def test_tip_mass_closed_form(a, eps):
    # Gauss-Bonnet on the smoothed disc: 2 pi minus boundary geodesic curvature
    u_eps = math.acos(eps / a)
    assert tip_curvature_mass(smooth_tip(a, eps)) == pytest.approx(2 * math.pi * (1 - a * math.sin(u_eps)), abs=1e-9)


def test_area_defect_is_order_eps():
    for a in (0.25, 0.75):
        d1 = abs(smoothed_surface_area(a, 1e-2) - 4 * math.pi * a)
        d2 = abs(smoothed_surface_area(a, 1e-3) - 4 * math.pi * a)
        assert d2 < d1 and d2 < 1e-2


def test_large_eps_rejected():
    with pytest.raises(EpsilonTooLarge):
        smooth_tip(0.5, 0.4)
    with pytest.raises(EpsilonTooLarge):
        smoothing_coeffs(0.5, 0.6)


def test_budget_and_calibration():
    c = calibrate_budget_constant([0.3, 0.6], [1e-2, 1e-3])
    assert c["tip_mass"] > 0 and c["area"] > 0
    for a in (0.3, 0.6):
        s = smooth_tip(a, 1e-3)
        assert tip_curvature_mass(s) <= curvature_budget(0.0, [math.pi * a], 1e-3, c["tip_mass"])
    with pytest.raises(OutOfRange):
        curvature_budget(1.0, [4.0], 1e-3, 1.0)


def test_sphere_needs_no_smoothing():
    assert total_curvature_smoothed(1.0, 1e-2) == 4 * math.pi
