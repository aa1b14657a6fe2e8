"""Triangulation of spherical regions with tagged boundary edges.

Points are placed on the sphere (boundary arcs sampled at spacing ``h``,
interior from a Fibonacci lattice), triangulated by a planar Delaunay
triangulation in a stereographic chart (which is conformal, so it is the
spherical Delaunay triangulation), cleaned up by boundary-edge recovery,
and relaxed with a few Laplacian passes projected back to the sphere.
"""
from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np
from scipy.spatial import Delaunay

from ..errors import BadRegionSpec, MeshQualityFailure
from ..regions import Region, build_region

__all__ = ["SurfaceMesh", "mesh_region", "icosphere", "fibonacci_sphere", "triangle_angles"]

MIN_ANGLE_DEG = 15.0
SMOOTHING_PASSES = 5


@dataclass(frozen=True)
class SurfaceMesh:
    vertices: np.ndarray
    triangles: np.ndarray
    boundary_edges: np.ndarray
    edge_tags: np.ndarray
    edge_curve: np.ndarray
    h: float

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def dirichlet_vertices(self) -> np.ndarray:
        e = self.boundary_edges[self.edge_tags == "dirichlet"]
        return np.unique(e.ravel())

    def free_vertices(self) -> np.ndarray:
        mask = np.ones(self.n_vertices, dtype=bool)
        mask[self.dirichlet_vertices()] = False
        return np.nonzero(mask)[0]

    def area(self) -> float:
        v = self.vertices[self.triangles]
        return float(0.5 * np.linalg.norm(np.cross(v[:, 1] - v[:, 0], v[:, 2] - v[:, 0]), axis=1).sum())

    def min_angle(self) -> float:
        return float(np.degrees(triangle_angles(self.vertices, self.triangles).min()))

    def to_off(self) -> str:
        """ASCII OFF with an extra block listing tagged boundary edges."""
        lines = ["OFF", f"{len(self.vertices)} {len(self.triangles)} 0"]
        lines += [" ".join(f"{c:.17g}" for c in v) for v in self.vertices]
        lines += [f"3 {t[0]} {t[1]} {t[2]}" for t in self.triangles]
        lines.append(f"BOUNDARY {len(self.boundary_edges)}")
        lines += [f"{e[0]} {e[1]} {tag}" for e, tag in zip(self.boundary_edges, self.edge_tags)]
        return "\n".join(lines) + "\n"


def triangle_angles(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    v = vertices[triangles]
    out = np.empty((len(triangles), 3))
    for k in range(3):
        p, q, r = v[:, k], v[:, (k + 1) % 3], v[:, (k + 2) % 3]
        e1, e2 = q - p, r - p
        out[:, k] = np.arctan2(np.linalg.norm(np.cross(e1, e2), axis=1), np.einsum("ij,ij->i", e1, e2))
    return out


def fibonacci_sphere(n: int) -> np.ndarray:
    k = np.arange(n) + 0.5
    z = 1.0 - 2.0 * k / n
    phi = math.pi * (3.0 - math.sqrt(5.0)) * k
    r = np.sqrt(1.0 - z * z)
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def icosphere(levels: int) -> tuple[np.ndarray, np.ndarray]:
    """Subdivided icosahedron projected onto the unit sphere."""
    t = (1.0 + math.sqrt(5.0)) / 2.0
    verts = [
        (-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0),
        (0, -1, t), (0, 1, t), (0, -1, -t), (0, 1, -t),
        (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1),
    ]
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    v = [np.array(p, dtype=float) / np.linalg.norm(p) for p in verts]
    f = faces
    for _ in range(levels):
        cache = {}

        def mid(i, j):
            key = (min(i, j), max(i, j))
            if key not in cache:
                m = v[i] + v[j]
                v.append(m / np.linalg.norm(m))
                cache[key] = len(v) - 1
            return cache[key]

        nf = []
        for a, b, c in f:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            nf += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        f = nf
    return np.array(v), np.array(f, dtype=np.int64)


def _rotation_to_pole(c: np.ndarray) -> np.ndarray:
    c = c / np.linalg.norm(c)
    helper = np.array([1.0, 0.0, 0.0]) if abs(c[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(helper, c)
    e1 /= np.linalg.norm(e1)
    return np.vstack([e1, np.cross(c, e1), c])


def _stereographic(x: np.ndarray, R: np.ndarray) -> np.ndarray:
    y = x @ R.T
    return y[:, :2] / (1.0 + y[:, 2:3])


def _triangulate(pts, region: Region, R) -> np.ndarray:
    tri = Delaunay(_stereographic(pts, R)).simplices
    cen = pts[tri].sum(axis=1)
    cen /= np.linalg.norm(cen, axis=1, keepdims=True)
    keep = np.ones(len(tri), dtype=bool)
    for c in region.constraints:
        keep &= c.margin(cen) > 1e-9
    return tri[keep]


def _edge_set(tri: np.ndarray) -> set:
    e = np.sort(np.concatenate([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]]), axis=1)
    return set(map(tuple, e))


def _orient(pts, tri):
    v = pts[tri]
    det = np.einsum("ij,ij->i", v[:, 0], np.cross(v[:, 1], v[:, 2]))
    tri = tri.copy()
    flip = det < 0
    tri[flip] = tri[flip][:, [0, 2, 1]]
    return tri


def mesh_region(region_or_W, V: dict | None = None, h: float = 0.1, max_recover: int = 12) -> SurfaceMesh:
    """Triangulate ``V`` (or a prebuilt :class:`Region`) at target edge length ``h``."""
    if not (1e-3 < h < 0.3):
        raise BadRegionSpec(f"mesh size h must lie in (1e-3, 0.3), got {h}")
    region = region_or_W if isinstance(region_or_W, Region) else build_region(region_or_W, V)
    arcs = region.arcs()

    bpts, _, chains = region.sample_boundary(h)
    n_fib = int(4.0 * math.pi / (0.5 * math.sqrt(3.0) * h * h))
    cand = fibonacci_sphere(n_fib)
    inside = region.contains(cand)
    for c in region.constraints:
        inside &= np.abs(np.arccos(np.clip(cand @ c.normal, -1, 1)) - c.radius) > 0.6 * h
    interior = cand[inside]

    # chains of boundary points, refined on demand so every boundary segment is a mesh edge
    chain_params = []
    for a, ch in zip(arcs, chains):
        chain_params.append(list(np.linspace(a.phi0, a.phi1, len(ch))))
    point_list = [p for p in bpts]
    chain_idx = [list(ch) for ch in chains]
    centre = np.concatenate([bpts, interior]).mean(axis=0)
    R = _rotation_to_pole(centre)

    for _ in range(max_recover):
        pts = np.concatenate([np.array(point_list), interior]) if len(interior) else np.array(point_list)
        tri = _triangulate(pts, region, R)
        edges = _edge_set(tri)
        missing = False
        for k, (a, ch, ph) in enumerate(zip(arcs, chain_idx, chain_params)):
            c = region.constraints[a.index]
            new_ch, new_ph = [ch[0]], [ph[0]]
            for m in range(len(ch) - 1):
                i, j = ch[m], ch[m + 1]
                if (min(i, j), max(i, j)) not in edges:
                    missing = True
                    mid_phi = 0.5 * (ph[m] + ph[m + 1])
                    point_list.append(c.point(mid_phi))
                    new_ch.append(len(point_list) - 1)
                    new_ph.append(mid_phi)
                new_ch.append(j)
                new_ph.append(ph[m + 1])
            chain_idx[k], chain_params[k] = new_ch, new_ph
        if not missing:
            break
        # boundary indices shifted nothing: interior points are appended after the boundary list
    else:
        raise MeshQualityFailure("boundary edges could not be recovered")

    n_b = len(point_list)
    pts = pts.copy()
    tri = _orient(pts, tri)
    used = np.unique(tri)
    if len(used) != len(pts):
        # drop orphaned interior points
        remap = -np.ones(len(pts), dtype=np.int64)
        remap[used] = np.arange(len(used))
        pts = pts[used]
        tri = remap[tri]
        chain_idx = [[int(remap[i]) for i in ch] for ch in chain_idx]
        n_b = int(np.sum(used < n_b))

    # Laplacian smoothing of interior vertices, projected to the sphere
    nbrs = [[] for _ in range(len(pts))]
    for t in tri:
        for k in range(3):
            nbrs[t[k]].append(t[(k + 1) % 3])
            nbrs[t[k]].append(t[(k + 2) % 3])
    boundary_mask = np.zeros(len(pts), dtype=bool)
    for ch in chain_idx:
        boundary_mask[ch] = True
    movable = np.nonzero(~boundary_mask)[0]
    nb_lists = [np.unique(nbrs[i]) for i in movable]
    for _ in range(SMOOTHING_PASSES):
        new = pts.copy()
        for i, nb in zip(movable, nb_lists):
            m = pts[nb].mean(axis=0)
            new[i] = m / np.linalg.norm(m)
        v = new[tri]
        det = np.einsum("ij,ij->i", v[:, 0], np.cross(v[:, 1], v[:, 2]))
        if np.any(det <= 0.0):
            break
        pts = new

    # boundary edges with tags
    bedges, tags, curves = [], [], []
    for a, ch in zip(arcs, chain_idx):
        c = region.constraints[a.index]
        for m in range(len(ch) - 1):
            bedges.append((ch[m], ch[m + 1]))
            tags.append(c.tag)
            curves.append(c.name)
    bedges = np.array(bedges, dtype=np.int64)
    # every boundary edge of the triangulation must be one of the sampled arc segments
    all_e = np.sort(np.concatenate([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]]), axis=1)
    uniq, counts = np.unique(all_e, axis=0, return_counts=True)
    tri_boundary = set(map(tuple, uniq[counts == 1]))
    arc_boundary = set(map(tuple, np.sort(bedges, axis=1)))
    if tri_boundary != arc_boundary:
        raise MeshQualityFailure("triangulation boundary does not match the region boundary")

    elen = np.linalg.norm(pts[uniq[:, 0]] - pts[uniq[:, 1]], axis=1)
    mesh = SurfaceMesh(
        vertices=pts,
        triangles=tri,
        boundary_edges=bedges,
        edge_tags=np.array(tags),
        edge_curve=np.array(curves),
        h=float(elen.max()),
    )
    if mesh.min_angle() < MIN_ANGLE_DEG:
        raise MeshQualityFailure(f"minimum angle {mesh.min_angle():.1f} deg below {MIN_ANGLE_DEG}")
    return mesh
