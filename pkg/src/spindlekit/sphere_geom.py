"""Convex geodesic polygons and lunes on the unit sphere.

Vertices are stored as unit 3-vectors, ordered counterclockwise as seen
from outside the sphere, so the interior lies to the left of every edge
and ``cross(v_i, v_{i+1}) . x >= 0`` for interior points ``x``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import DegenerateEdge, InvalidSplit, NotConvex, OutOfRange

__all__ = [
    "UNIT_TOL",
    "unit_vec",
    "SphericalPolygon",
    "Lune",
    "AngleReport",
    "interior_angles",
    "polygon_area",
    "make_lune",
    "delta_of_polygon",
    "angle_report",
    "gen_p_dichotomy",
    "DichotomyReport",
    "random_convex_polygon",
    "octant_triangle",
    "regular_polygon",
    "from_lonlat",
]

UNIT_TOL = 1e-6
CONVEXITY_TOL = 1e-10


def unit_vec(x) -> np.ndarray:
    """Return ``x`` renormalized onto the unit sphere.

    Inputs whose norm is further than ``UNIT_TOL`` from 1 are rejected
    rather than silently projected.
    """
    v = np.asarray(x, dtype=float)
    if v.shape[-1] != 3:
        raise ValueError(f"expected 3-vectors, got shape {v.shape}")
    norm = np.linalg.norm(v, axis=-1, keepdims=True)
    if not np.all(np.isfinite(norm)) or np.any(np.abs(norm - 1.0) > UNIT_TOL):
        raise OutOfRange("vertex is not on the unit sphere (|norm - 1| > 1e-6)")
    return v / norm


def from_lonlat(lon, lat) -> np.ndarray:
    lon = np.asarray(lon, dtype=float)
    lat = np.asarray(lat, dtype=float)
    return np.stack(
        [np.cos(lat) * np.cos(lon), np.cos(lat) * np.sin(lon), np.sin(lat)], axis=-1
    )


def _tangent(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Unit tangent at ``p`` of the minor great-circle arc towards ``q``."""
    t = q - np.dot(p, q) * p
    n = np.linalg.norm(t)
    if n < 1e-14:
        raise DegenerateEdge("consecutive vertices coincide or are antipodal")
    return t / n


@dataclass(frozen=True)
class SphericalPolygon:
    """Geodesic polygon given by its vertices (counterclockwise from outside)."""

    vertices: np.ndarray
    check_convex: bool = field(default=True, compare=False)

    def __post_init__(self):
        v = unit_vec(self.vertices)
        if v.ndim != 2 or len(v) < 2:
            raise ValueError("a polygon needs at least two vertices")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        n = len(v)
        for i in range(n):
            p, q = v[i], v[(i + 1) % n]
            if np.linalg.norm(np.cross(p, q)) < 1e-14:
                raise DegenerateEdge(
                    f"edge {i}: consecutive vertices coincide or are antipodal"
                )
        if self.check_convex and n >= 3 and not self.is_convex():
            raise NotConvex("vertex list does not bound a convex region")

    @property
    def n(self) -> int:
        return len(self.vertices)

    def edge_normals(self) -> np.ndarray:
        v = self.vertices
        nrm = np.cross(v, np.roll(v, -1, axis=0))
        return nrm / np.linalg.norm(nrm, axis=1, keepdims=True)

    def is_convex(self, tol: float = CONVEXITY_TOL) -> bool:
        v = self.vertices
        nrm = self.edge_normals()
        side = nrm @ v.T
        n = len(v)
        for i in range(n):
            others = [j for j in range(n) if j != i and j != (i + 1) % n]
            if np.any(side[i, others] <= tol):
                return False
        return True

    def contains(self, x, tol: float = 0.0) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.all(x @ self.edge_normals().T >= -tol, axis=-1)

    def interior_angles(self) -> np.ndarray:
        return interior_angles(self)

    def area(self) -> float:
        return polygon_area(self)

    @property
    def a(self) -> float:
        return self.area() / (2.0 * math.pi)

    def to_json(self) -> dict:
        return {"vertices": self.vertices.tolist()}


@dataclass(frozen=True)
class Lune:
    """Lune with angle ``pi * a`` at its two antipodal tips.

    The tip sits at ``(0, 0, 1)``; the bounding meridians are at
    longitude 0 and ``pi * a``.
    """

    a: float

    def __post_init__(self):
        if not (0.0 < self.a <= 1.0):
            raise OutOfRange(f"lune parameter a must lie in (0, 1], got {self.a}")

    @property
    def tip(self) -> np.ndarray:
        return np.array([0.0, 0.0, 1.0])

    @property
    def vertices(self) -> np.ndarray:
        return np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]])

    @property
    def n(self) -> int:
        return 2

    def interior_angles(self) -> np.ndarray:
        return np.full(2, math.pi * self.a)

    def area(self) -> float:
        return 2.0 * math.pi * self.a

    def edge_normals(self) -> np.ndarray:
        t = math.pi * self.a
        return np.array([[0.0, 1.0, 0.0], [math.sin(t), -math.cos(t), 0.0]])

    def contains(self, x, tol: float = 0.0) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.all(x @ self.edge_normals().T >= -tol, axis=-1)

    def to_json(self) -> dict:
        return {"lune": {"a": self.a}}


@dataclass(frozen=True)
class AngleReport:
    interior: np.ndarray
    exterior: np.ndarray
    area: float
    a: float
    delta: float


def interior_angles(P) -> np.ndarray:
    """Interior angles of ``P`` in radians, via atan2 of tangent components."""
    if isinstance(P, Lune):
        return P.interior_angles()
    v = P.vertices
    n = len(v)
    if n < 3:
        raise ValueError("interior_angles needs n >= 3; use make_lune for lunes")
    out = np.empty(n)
    for i in range(n):
        p = v[i]
        t_next = _tangent(p, v[(i + 1) % n])
        t_prev = _tangent(p, v[i - 1])
        # counterclockwise rotation (about the outward normal) taking t_next to t_prev
        ang = math.atan2(float(np.dot(p, np.cross(t_next, t_prev))), float(np.dot(t_next, t_prev)))
        out[i] = ang % (2.0 * math.pi)
    return out


def polygon_area(P) -> float:
    """Area of a convex polygon by spherical excess."""
    if isinstance(P, Lune):
        return P.area()
    th = interior_angles(P)
    return float(np.sum(th) - (len(th) - 2) * math.pi)


def make_lune(a: float) -> Lune:
    return Lune(float(a))


def delta_of_polygon(P) -> float:
    """Smallest interior angle minus the lune angle ``pi * a`` of equal area."""
    if isinstance(P, Lune):
        return 0.0
    th = interior_angles(P)
    a = polygon_area(P) / (2.0 * math.pi)
    return float(np.min(th) - math.pi * a)


def angle_report(P) -> AngleReport:
    th = interior_angles(P)
    area = polygon_area(P)
    a = area / (2.0 * math.pi)
    return AngleReport(
        interior=th,
        exterior=math.pi - th,
        area=area,
        a=a,
        delta=float(np.min(th) - math.pi * a),
    )


@dataclass(frozen=True)
class DichotomyReport:
    q1: float
    q2: float
    a: float

    @property
    def total(self) -> float:
        return self.q1 + self.q2

    @property
    def holds(self) -> bool:
        return max(self.q1, self.q2) >= self.a - 1e-12


def gen_p_dichotomy(angles, m: int, a: float) -> DichotomyReport:
    """Split the (ordered) interior angles after position ``m``.

    ``q1`` uses the first ``m`` angles, ``q2`` the rest; their sum is
    ``2a`` for a convex polygon of area ``2*pi*a``, so at least one of
    them is ``>= a``.
    """
    th = np.asarray(angles, dtype=float)
    n = len(th)
    if not (0 <= m <= n):
        raise InvalidSplit(f"split index {m} outside [0, {n}]")
    q1 = (math.fsum(th[:m]) - (m - 1) * math.pi) / math.pi
    q2 = (math.fsum(th[m:]) - (n - m - 1) * math.pi) / math.pi
    return DichotomyReport(q1=q1, q2=q2, a=float(a))


def _rotation_to(c: np.ndarray) -> np.ndarray:
    """Orthonormal matrix whose third row is ``c`` (maps c to the z axis)."""
    c = c / np.linalg.norm(c)
    helper = np.array([1.0, 0.0, 0.0]) if abs(c[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(helper, c)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(c, e1)
    return np.vstack([e1, e2, c])


def random_convex_polygon(
    rng: np.random.Generator, n: int, radius: float = 1.0, center=None
) -> SphericalPolygon:
    """Random convex polygon with ``n`` vertices inside a cap of given radius.

    Uses the gnomonic chart, where great circles are straight lines, so a
    planar convex hull is a spherical convex polygon.
    """
    if center is None:
        center = rng.normal(size=3)
    R = _rotation_to(np.asarray(center, dtype=float))
    tan_r = math.tan(min(radius, 1.4))
    for _ in range(1000):
        phi = np.sort(rng.uniform(0.0, 2.0 * math.pi, size=n))
        gaps = np.diff(np.concatenate([phi, [phi[0] + 2.0 * math.pi]]))
        if np.max(gaps) >= math.pi - 0.05 or np.min(gaps) < 0.05:
            continue
        rho = tan_r * rng.uniform(0.4, 1.0, size=n)
        pts = np.stack([rho * np.cos(phi), rho * np.sin(phi)], axis=1)
        # keep only strictly convex configurations
        ok = True
        for i in range(n):
            p0, p1, p2 = pts[i - 1], pts[i], pts[(i + 1) % n]
            cr = (p1[0] - p0[0]) * (p2[1] - p1[1]) - (p1[1] - p0[1]) * (p2[0] - p1[0])
            if cr <= 1e-3 * tan_r * tan_r:
                ok = False
                break
        if not ok:
            continue
        xyz = np.column_stack([pts, np.ones(n)])
        xyz /= np.linalg.norm(xyz, axis=1, keepdims=True)
        return SphericalPolygon(xyz @ R)
    raise RuntimeError("could not sample a convex polygon")


def octant_triangle() -> SphericalPolygon:
    return SphericalPolygon(np.eye(3))


def regular_polygon(n: int, circumradius: float, center=(0.0, 0.0, 1.0)) -> SphericalPolygon:
    """Regular ``n``-gon whose vertices lie at geodesic distance ``circumradius`` from ``center``."""
    phi = 2.0 * math.pi * np.arange(n) / n
    pts = np.stack(
        [
            math.sin(circumradius) * np.cos(phi),
            math.sin(circumradius) * np.sin(phi),
            np.full(n, math.cos(circumradius)),
        ],
        axis=1,
    )
    R = _rotation_to(np.asarray(center, dtype=float))
    return SphericalPolygon(pts @ R)
