import math

import numpy as np
import pytest
from scipy.sparse.linalg import eigsh

from spindlekit.errors import BadRegionSpec, DegenerateTriangle, PremiseViolated
from spindlekit.fem import (
    assemble,
    dn_eigenvalue,
    element_matrices,
    icosphere,
    mesh_region,
    rayleigh_quotient,
    smallest_eigenvalue,
    triangle_angles,
)
from spindlekit.fem.mesh import SurfaceMesh
from spindlekit.regions import build_region
from spindlekit.spectral import cap_eigenvalue
from spindlekit.spindle import cap_with_area
from spindlekit.sphere_geom import Lune, octant_triangle

QUARTER = (Lune(1.0), {"kind": "latitude-cap", "b": 0.0})


def test_reference_element():
    p = np.array([[0.0, 0, 0], [1, 0, 0], [0, 1, 0]])
    K, M, area = element_matrices(p)
    assert area == pytest.approx(0.5)
    assert np.allclose(K, 0.5 * np.array([[2, -1, -1], [-1, 1, 0], [-1, 0, 1]]), atol=1e-15)
    assert M.sum() == pytest.approx(area)
    assert np.allclose(M, area / 12 * (np.ones((3, 3)) + np.eye(3)))
    with pytest.raises(DegenerateTriangle):
        element_matrices(np.array([[0.0, 0, 0], [1, 0, 0], [2, 0, 0]]))


def test_mesh_invariants():
    W, V = Lune(0.5), {"kind": "latitude-cap", "b": 0.3}
    m = mesh_region(W, V, 0.1)
    assert np.allclose(np.linalg.norm(m.vertices, axis=1), 1.0, atol=1e-12)
    v = m.vertices[m.triangles]
    det = np.einsum("ij,ij->i", v[:, 0], np.cross(v[:, 1], v[:, 2]))
    assert np.all(det > 0)
    assert np.degrees(triangle_angles(m.vertices, m.triangles).min()) >= 15.0
    # boundary vertices lie on the exact curves, tags split into the two classes
    reg = build_region(W, V)
    for (i, j), name in zip(m.boundary_edges, m.edge_curve):
        c = next(c for c in reg.constraints if c.name == name)
        assert abs(c.margin(m.vertices[i])) < 1e-10 and abs(c.margin(m.vertices[j])) < 1e-10
    assert set(m.edge_tags) == {"dirichlet", "neumann"}
    assert len(set(m.edge_curve)) == 3


def test_mesh_size_scaling_and_area():
    W, V = QUARTER
    n = [len(mesh_region(W, V, h).triangles) for h in (0.2, 0.1)]
    assert 3.0 < n[1] / n[0] < 5.5
    errs = [abs(mesh_region(W, V, h).area() - math.pi) for h in (0.2, 0.1, 0.05)]
    assert errs[2] < errs[1] < errs[0]
    assert errs[2] < 0.01


def test_mass_and_symmetry():
    m = mesh_region(octant_triangle(), None, 0.1)
    sys = assemble(m)
    assert abs(sys.stiffness - sys.stiffness.T).max() <= 1e-14
    assert abs(sys.mass - sys.mass.T).max() <= 1e-14
    assert sys.mass.sum() == pytest.approx(m.area(), rel=1e-12)
    assert sys.mass.sum() == pytest.approx(math.pi / 2, rel=5e-3)
    # constants are in the kernel of the stiffness
    assert np.abs(sys.stiffness @ np.ones(m.n_vertices)).max() < 1e-12


def test_icosphere_first_eigenvalue():
    vals = []
    for level in (2, 3, 4):
        v, f = icosphere(level)
        empty = np.zeros((0, 2), dtype=np.int64)
        mesh = SurfaceMesh(v, f, empty, np.array([], dtype=str), np.array([], dtype=str), 0.0)
        s = assemble(mesh)
        w = eigsh(s.stiffness.tocsc(), k=2, M=s.mass.tocsc(), sigma=-0.1, which="LM")[0]
        vals.append(sorted(w)[1])
    errs = [abs(x - 2.0) for x in vals]
    assert errs[2] < errs[1] < errs[0] and errs[2] < 5e-3


def test_quarter_sphere_convergence():
    W, V = QUARTER
    hs = (0.2, 0.1, 0.05)
    mu = [smallest_eigenvalue(assemble(mesh_region(W, V, h)), 1e-10).value for h in hs]
    errs = [abs(x - 2.0) for x in mu]
    orders = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
    assert all(1.5 <= p <= 2.5 for p in orders), orders


def test_lune_matches_shooting():
    h = 0.05
    r = dn_eigenvalue(Lune(0.5), {"kind": "latitude-cap", "b": 0.4}, h, 1e-10)
    lam = cap_eigenvalue(0.4).value
    assert abs(r.value - lam) <= 5 * h * h + 1e-8
    assert r.method == "fem" and r.error_estimate > 0


def test_rayleigh_quotient_and_residual():
    sys = assemble(mesh_region(Lune(0.5), {"kind": "latitude-cap", "b": 0.2}, 0.1))
    r, x = smallest_eigenvalue(sys, 1e-10, return_vector=True)
    assert rayleigh_quotient(sys, x[sys.free]) == pytest.approx(r.value, rel=1e-9)
    assert np.all(x[sys.free] * np.sign(x[sys.free].sum()) > -1e-12)


def test_nested_dirichlet_monotone():
    h = 0.1
    small = smallest_eigenvalue(assemble(mesh_region(Lune(0.5), {"kind": "latitude-cap", "b": 0.5}, h))).value
    big = smallest_eigenvalue(assemble(mesh_region(Lune(0.5), {"kind": "latitude-cap", "b": 0.2}, h))).value
    assert small >= big - 5 * h * h


def test_disc_in_triangle_beats_cap_bound():
    V = {"kind": "geodesic-disc", "center": list(np.ones(3) / math.sqrt(3)), "radius": 0.4}
    A = build_region(octant_triangle(), V).area()
    lam = cap_eigenvalue(cap_with_area(0.25, 2 * A).b).value
    assert dn_eigenvalue(octant_triangle(), V, 0.05).value > lam


def test_pure_neumann_rejected():
    sys = assemble(mesh_region(octant_triangle(), None, 0.2))
    with pytest.raises(PremiseViolated):
        smallest_eigenvalue(sys)


def test_bad_mesh_size_and_region():
    with pytest.raises(BadRegionSpec):
        mesh_region(*QUARTER, h=0.5)
    with pytest.raises(BadRegionSpec):
        mesh_region(octant_triangle(), {"kind": "geodesic-disc", "center": [-1, 0, 0], "radius": 0.2}, 0.1)


def test_off_dump_round_trip():
    m = mesh_region(*QUARTER, h=0.2)
    lines = m.to_off().splitlines()
    assert lines[0] == "OFF"
    nv, nt, _ = map(int, lines[1].split())
    assert (nv, nt) == (m.n_vertices, len(m.triangles))
    verts = np.array([[float(x) for x in ln.split()] for ln in lines[2 : 2 + nv]])
    assert np.array_equal(verts, m.vertices)
    k = 2 + nv + nt
    assert lines[k] == f"BOUNDARY {len(m.boundary_edges)}"
    assert {ln.split()[2] for ln in lines[k + 1 :]} == {"dirichlet", "neumann"}
