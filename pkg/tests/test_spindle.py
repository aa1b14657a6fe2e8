import math

import numpy as np
import pytest
from scipy import special

from spindlekit.errors import OutOfRange, SelfIntersection
from spindlekit.isoperimetry import offcenter_circle
from spindlekit.spindle import (
    Cap,
    Curve,
    cap_area,
    cap_perimeter,
    cap_with_area,
    curve_length,
    enclosed_area,
    gaussian_curvature,
    iso_profile,
    latitude_circle,
    lune_isometry,
    profile_g,
    self_intersects,
    tip_coordinate,
    total_area,
)


@pytest.mark.parametrize("a", [0.1, 0.37, 0.8, 0.999])
def test_profile_matches_incomplete_elliptic_integral(a):
    for u in np.linspace(-1.5, 1.5, 13):
        assert profile_g(a, u) == pytest.approx(special.ellipeinc(u, a * a), abs=1e-13)
    assert tip_coordinate(a) == pytest.approx(special.ellipe(a * a), abs=1e-13)


def test_profile_reduces_to_sine_on_sphere():
    u = np.linspace(-math.pi / 2, math.pi / 2, 101)
    assert max(abs(profile_g(1.0, x) - math.sin(x)) for x in u) < 1e-15


def test_profile_simpson_oracle():
    # independent composite Simpson rule on a fine grid
    a, u = 0.6, 1.1
    t = np.linspace(0, u, 20001)
    f = np.sqrt(1 - a * a * np.sin(t) ** 2)
    h = t[1] - t[0]
    simpson = h / 3 * (f[0] + f[-1] + 4 * f[1:-1:2].sum() + 2 * f[2:-1:2].sum())
    assert profile_g(a, u) == pytest.approx(simpson, abs=1e-13)


def test_out_of_range_inputs():
    with pytest.raises(OutOfRange):
        profile_g(0.0, 0.1)
    with pytest.raises(OutOfRange):
        profile_g(1.2, 0.1)
    with pytest.raises(OutOfRange):
        Cap(0.5, 1.6)


def test_curvature_is_one():
    for a in (0.2, 0.5, 0.9):
        u = np.linspace(-1.4, 1.4, 29)
        assert np.allclose(gaussian_curvature(a, u), 1.0, atol=1e-13)


def test_cap_identity_and_inverse():
    rng = np.random.default_rng(0)
    for _ in range(200):
        a, b = rng.uniform(0.01, 1), rng.uniform(-1.5, 1.5)
        c = Cap(a, b)
        A = cap_area(c)
        assert cap_perimeter(c) ** 2 == pytest.approx(A * (4 * math.pi * a - A), abs=1e-12)
        assert iso_profile(a, A) == pytest.approx(cap_perimeter(c), abs=1e-12)
        assert cap_with_area(a, A).b == pytest.approx(b, abs=1e-10)
    assert total_area(0.3) == pytest.approx(1.2 * math.pi)


@pytest.mark.parametrize("a,b", [(0.5, 0.3), (0.25, -0.7), (1.0, 0.0)])
def test_latitude_circle_length_and_area(a, b):
    c = latitude_circle(b)
    assert curve_length(a, c) == pytest.approx(2 * math.pi * a * math.cos(b), abs=1e-12)
    assert enclosed_area(a, c) == pytest.approx(2 * math.pi * a * (1 - math.sin(b)), abs=1e-12)
    rev = latitude_circle(b, reverse=True)
    assert enclosed_area(a, rev) == pytest.approx(2 * math.pi * a * (1 + math.sin(b)), abs=1e-12)


def test_meridian_segment_length_is_coordinate_difference():
    seg = Curve(point=lambda t: (-0.5 + 1.3 * t, np.full_like(t, 0.4)), closed=False)
    assert curve_length(0.3, seg) == pytest.approx(1.3, abs=1e-12)


def test_offcenter_circle_has_sphere_values():
    # lune isometry carries a sphere circle of radius r to S_a unchanged
    a, r = 0.5, 0.4
    c = offcenter_circle(a, 0.2, r)
    assert curve_length(a, c) == pytest.approx(2 * math.pi * math.sin(r), abs=1e-9)
    assert enclosed_area(a, c) == pytest.approx(2 * math.pi * (1 - math.cos(r)), abs=1e-9)


def test_from_samples_reproduces_circle():
    t = np.linspace(0, 1, 200, endpoint=False)
    c = Curve.from_samples(np.column_stack([np.full_like(t, 0.2), 2 * math.pi * t]))
    assert enclosed_area(0.5, c) == pytest.approx(math.pi * (1 - math.sin(0.2)), abs=1e-9)


def test_figure_eight_detected():
    fig8 = Curve(point=lambda t: (0.3 * np.sin(4 * math.pi * t), 0.5 * np.sin(2 * math.pi * t)))
    assert self_intersects(0.5, fig8)
    with pytest.raises(SelfIntersection):
        enclosed_area(0.5, fig8)


def test_lune_isometry_scales_longitude():
    p = lune_isometry(0.5, 0.1, 0.25 * math.pi)
    assert p.u == 0.1 and p.v == pytest.approx(0.5 * math.pi)
    with pytest.raises(OutOfRange):
        lune_isometry(0.5, 0.1, 2.0)
