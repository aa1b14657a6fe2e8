import math

import numpy as np
import pytest

from spindlekit.errors import BadRegionSpec
from spindlekit.regions import Constraint, build_region, parse_polygon
from spindlekit.sphere_geom import Lune, octant_triangle

C = list(np.ones(3) / math.sqrt(3))


def test_whole_polygons():
    assert build_region(octant_triangle()).area() == pytest.approx(math.pi / 2, abs=1e-13)
    r = build_region(Lune(0.3))
    assert r.area() == pytest.approx(0.6 * math.pi, abs=1e-13)
    assert r.boundary_length("dirichlet") == 0.0
    assert r.boundary_length("neumann") == pytest.approx(2 * math.pi, abs=1e-13)


@pytest.mark.parametrize("a,b", [(0.5, 0.4), (0.25, -0.4), (1.0, 0.0)])
def test_lune_cap_is_quarter_of_cap(a, b):
    r = build_region(Lune(a), {"kind": "latitude-cap", "b": b})
    assert r.area() == pytest.approx(math.pi * a * (1 - math.sin(b)), abs=1e-12)
    assert r.boundary_length("dirichlet") == pytest.approx(math.pi * a * math.cos(b), abs=1e-12)
    comp = build_region(Lune(a), {"kind": "latitude-cap", "b": b, "complement": True})
    assert r.area() + comp.area() == pytest.approx(2 * math.pi * a, abs=1e-12)


def test_interior_disc_and_annulus():
    rho = 0.3
    V = {"kind": "geodesic-disc", "center": C, "radius": rho}
    disc = build_region(octant_triangle(), V)
    assert disc.area() == pytest.approx(2 * math.pi * (1 - math.cos(rho)), abs=1e-12)
    assert disc.euler_characteristic() == 1
    hole = build_region(octant_triangle(), dict(V, complement=True))
    assert hole.euler_characteristic() == 0
    assert hole.area() == pytest.approx(math.pi / 2 - disc.area(), abs=1e-12)


def test_corner_cap_area_uses_vertex_angle():
    r = 0.5
    reg = build_region(octant_triangle(), {"kind": "latitude-cap", "vertex": 0, "b": math.pi / 2 - r})
    assert reg.area() == pytest.approx(math.pi / 2 * (1 - math.cos(r)), abs=1e-12)


def test_halfspace_cut_and_corners():
    reg = build_region(octant_triangle(), {"kind": "halfspace", "normal": [1 / math.sqrt(2), -1 / math.sqrt(2), 0]})
    assert reg.area() == pytest.approx(math.pi / 4, abs=1e-12)
    angles = sorted(ang for _, ang in reg.corner_angles())
    assert np.allclose(angles, [math.pi / 4, math.pi / 2, math.pi / 2], atol=1e-12)


def test_sampled_boundary_lies_on_circles():
    reg = build_region(Lune(0.5), {"kind": "latitude-cap", "b": 0.3})
    pts, arc_ids, chains = reg.sample_boundary(0.05)
    arcs = reg.arcs()
    for arc, chain in zip(arcs, chains):
        c = reg.constraints[arc.index]
        assert np.allclose(c.margin(pts[chain]), 0.0, atol=1e-12)
        seg = np.linalg.norm(np.diff(pts[chain], axis=0), axis=1)
        assert seg.max() <= 0.05


def test_tag_overrides_and_errors():
    reg = build_region(Lune(0.5), {"kind": "latitude-cap", "b": 0.3}, dirichlet=["W.0"])
    assert reg.boundary_length("neumann") == pytest.approx(math.pi / 2 - 0.3, abs=1e-12)
    with pytest.raises(BadRegionSpec):
        build_region(Lune(0.5), {"kind": "latitude-cap", "b": 0.3}, dirichlet=["nope"])
    with pytest.raises(BadRegionSpec):
        build_region(octant_triangle(), {"kind": "geodesic-disc", "center": [1, 0, 0], "radius": 0.3})
    with pytest.raises(BadRegionSpec):
        build_region(octant_triangle(), {"kind": "halfspace", "normal": [-1, 0, 0], "offset": 0.5})
    with pytest.raises(BadRegionSpec):
        build_region(octant_triangle(), {"kind": "blob"})
    with pytest.raises(BadRegionSpec):
        parse_polygon({"sides": 3})


def test_constraint_geometry():
    c = Constraint(np.array([0, 0, 1.0]), 0.5, "dirichlet", "x")
    assert c.radius == pytest.approx(math.acos(0.5))
    assert c.geodesic_curvature == pytest.approx(0.5 / math.sqrt(0.75))
    assert np.allclose(c.margin(c.point(np.linspace(0, 6, 7))), 0.0, atol=1e-15)
