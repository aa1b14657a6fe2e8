"""Isoperimetric checks on spindles and doubled convex polygons.

The model inequality is ``L^2 >= A (4 pi a - A)`` with equality exactly for
latitude caps on the spindle ``S_a``.  Curves on ``S_a`` are parametric
curves in ``(u, v)``; regions on a doubled polygon are given by a cut of
one copy (a :mod:`regions` V-spec) or by a disc inside one copy, whose
length and area are computed exactly from circle arcs.
"""
from __future__ import annotations

from dataclasses import dataclass
import cmath
import math

import numpy as np

from .errors import ChartViolation, OutOfRange, PremiseViolated
from .regions import Region, build_region
from .sphere_geom import Lune, SphericalPolygon, delta_of_polygon, interior_angles
from .spindle import HALF_PI, Curve, check_a, curve_length, enclosed_area, latitude_circle

__all__ = [
    "NUMERIC_TOL",
    "EQUALITY_TOL",
    "IsoCheckResult",
    "IsoTestCurveFamily",
    "DoubledRegion",
    "iso_margin",
    "check_curve",
    "check_doubled",
    "check_convex_subset",
    "lemma_sum_check",
    "profile_ode_identity",
    "perturbed_cap",
    "offcenter_circle",
    "star_curve",
    "spindle_family",
    "polygon_family",
]

NUMERIC_TOL = 1e-6
EQUALITY_TOL = 1e-8
FAMILY_KINDS = ("latitude", "perturbed-caps", "off-center", "star-shaped", "multi-component")


@dataclass(frozen=True)
class IsoCheckResult:
    L: float
    A: float
    a: float
    margin: float
    relative_margin: float
    passed: bool
    label: str = ""
    equality_expected: bool = False

    @property
    def is_equality(self) -> bool:
        return abs(self.margin) <= EQUALITY_TOL * (4.0 * math.pi * self.a) ** 2


def iso_margin(L: float, A: float, a: float, total: float | None = None, label: str = "", equality_expected: bool = False) -> IsoCheckResult:
    """Margin ``L^2 - A (total - A)`` with ``total = 4 pi a`` by default."""
    total = 4.0 * math.pi * a if total is None else total
    bound = A * (total - A)
    margin = L * L - bound
    rel = margin / bound if bound > 0.0 else math.inf
    passed = margin >= -NUMERIC_TOL * (4.0 * math.pi * a) ** 2
    return IsoCheckResult(
        L=float(L), A=float(A), a=float(a), margin=float(margin), relative_margin=float(rel),
        passed=bool(passed), label=label, equality_expected=equality_expected,
    )


def check_curve(a: float, curves, label: str = "", equality_expected: bool = False) -> IsoCheckResult:
    """Check a (multi-component) boundary on ``S_a``.

    ``curves`` is a :class:`Curve` or a list of curves bounding disjoint
    regions; lengths and enclosed areas add.
    """
    a = check_a(a)
    if isinstance(curves, Curve):
        curves = [curves]
    L = 0.0
    A = 0.0
    for c in curves:
        u, _ = c(np.linspace(0.0, 1.0, 257))
        if not np.all(np.isfinite(u)) or np.any(np.abs(u) >= HALF_PI):
            raise ChartViolation("curve leaves the chart |u| < pi/2")
        L += curve_length(a, c)
        A += enclosed_area(a, c)
    return iso_margin(L, A, a, label=label, equality_expected=equality_expected)


@dataclass(frozen=True)
class DoubledRegion:
    """Region on the double of ``W``.

    ``doubled`` regions are ``V`` together with its mirror copy (so the
    seam ``dV`` on ``dW`` is interior); otherwise ``V`` is a region inside
    one copy only and must not touch ``dW``.
    """

    region: Region
    doubled: bool = True

    def length_area(self) -> tuple[float, float]:
        L = self.region.boundary_length("dirichlet")
        A = self.region.area()
        if self.doubled:
            return 2.0 * L, 2.0 * A
        if self.region.boundary_length("neumann") > 0.0:
            raise ChartViolation("single-copy region touches the seam")
        return L, A


def _polygon_a(W) -> float:
    return W.a if isinstance(W, Lune) else W.area() / (2.0 * math.pi)


def check_doubled(W, parts, label: str = "", equality_expected: bool = False) -> IsoCheckResult:
    """Check a union of disjoint :class:`DoubledRegion` parts on the double of ``W``."""
    if isinstance(parts, DoubledRegion):
        parts = [parts]
    L = A = 0.0
    for p in parts:
        dl, da = p.length_area()
        L += dl
        A += da
    return iso_margin(L, A, _polygon_a(W), label=label, equality_expected=equality_expected)


def check_convex_subset(W, V, label: str = "", equality_expected: bool = False) -> IsoCheckResult:
    """``L^2 >= A (2 pi a - A)`` for ``V`` inside a convex ``W`` (free boundary on ``dW``).

    ``L`` counts only the part of ``dV`` off ``dW``.  Doubling gives
    ``(2L, 2A)`` on the double, which is the same inequality.
    """
    region = V if isinstance(V, Region) else build_region(W, V)
    a = _polygon_a(W)
    L = region.boundary_length("dirichlet")
    A = region.area()
    doubled = iso_margin(2.0 * L, 2.0 * A, a, label=label, equality_expected=equality_expected)
    bound = A * (2.0 * math.pi * a - A)
    return IsoCheckResult(
        L=L, A=A, a=a, margin=L * L - bound, relative_margin=(L * L - bound) / bound,
        passed=doubled.passed, label=label, equality_expected=equality_expected,
    )


def lemma_sum_check(Ls, As, a: float) -> bool:
    """Whether ``(sum L)^2 > (sum A)(4 pi a - sum A)`` given the per-part premise."""
    a = check_a(a)
    L = np.asarray(Ls, dtype=float).ravel()
    A = np.asarray(As, dtype=float).ravel()
    if len(L) != len(A):
        raise ValueError("Ls and As differ in length")
    if len(L) < 2:
        raise PremiseViolated("the sum inequality needs at least two parts")
    if np.any(L <= 0.0) or np.any(A <= 0.0):
        raise PremiseViolated("lengths and areas must be positive")
    total = 4.0 * math.pi * a
    prem = L * L - A * (total - A)
    if np.any(prem < -1e-12 * total * total):
        raise PremiseViolated("some part violates L^2 >= A (4 pi a - A)")
    sL = math.fsum(L)
    sA = math.fsum(A)
    return sL * sL > sA * (total - sA)


def _cap_profile_length(a: float, t):
    """``L(t)`` of the cap of area ``t``, through the latitude ``b`` (complex-safe)."""
    b = cmath.asin(1.0 - t / (2.0 * math.pi * a))
    return 2.0 * math.pi * a * cmath.cos(b)


def profile_ode_identity(a: float, t_grid) -> float:
    """Max ``|L L' - (2 pi a - t)|`` for the cap profile, ``L'`` by complex step."""
    a = check_a(a)
    t = np.asarray(t_grid, dtype=float).ravel()
    if np.any((t <= 0.0) | (t >= 4.0 * math.pi * a)):
        raise OutOfRange("t must lie in (0, 4 pi a)")
    step = 1e-30
    res = 0.0
    for ti in t:
        L = _cap_profile_length(a, complex(ti, 0.0)).real
        dL = _cap_profile_length(a, complex(ti, step)).imag / step
        res = max(res, abs(L * dL - (2.0 * math.pi * a - ti)))
    return res


# curve generators on S_a


def perturbed_cap(b: float, coeffs, phases, reverse: bool = False) -> Curve:
    """``u = b + sum c_k sin(2 pi k t + phi_k)`` around the axis (one tip enclosed)."""
    c = np.asarray(coeffs, dtype=float)
    ph = np.asarray(phases, dtype=float)
    k = np.arange(1, len(c) + 1)
    sgn = -1.0 if reverse else 1.0
    two_pi = 2.0 * math.pi

    def point(t):
        arg = two_pi * np.multiply.outer(t, k) + ph
        return b + np.sin(arg) @ c, sgn * two_pi * t

    def deriv(t):
        arg = two_pi * np.multiply.outer(t, k) + ph
        return np.cos(arg) @ (two_pi * k * c), np.full_like(t, sgn * two_pi)

    return Curve(point=point, deriv=deriv)


def _sphere_to_spindle(a: float, x: np.ndarray):
    u = np.arcsin(np.clip(x[..., 2], -1.0, 1.0))
    lon = np.arctan2(x[..., 1], x[..., 0])
    return u, lon / a


def star_curve(a: float, u0: float, radius_fn, radius_deriv=None) -> Curve:
    """Curve ``r = radius_fn(theta)`` in geodesic polar coordinates about ``(u0, 0)``.

    Built on the unit sphere and carried to ``S_a`` by ``v = lon / a``;
    valid while the curve avoids the poles and ``|lon| < pi a``.
    """
    a = check_a(a)
    c = np.array([math.cos(u0), 0.0, math.sin(u0)])
    north = np.array([-math.sin(u0), 0.0, math.cos(u0)])
    east = np.array([0.0, 1.0, 0.0])
    two_pi = 2.0 * math.pi

    def sphere_point(t):
        th = two_pi * np.asarray(t, dtype=float)
        r = radius_fn(th)
        # east -> north is counterclockwise seen from outside
        d = np.multiply.outer(np.cos(th), east) + np.multiply.outer(np.sin(th), north)
        return np.multiply.outer(np.cos(r), c) + np.sin(r)[..., None] * d

    def point(t):
        return _sphere_to_spindle(a, sphere_point(t))

    curve = Curve(point=point)
    th = np.linspace(0.0, two_pi, 721)
    x = sphere_point(th / two_pi)
    u, v = _sphere_to_spindle(a, x)
    if np.any(np.abs(u) >= HALF_PI - 1e-6) or np.any(np.abs(v) >= math.pi):
        raise ChartViolation("curve does not fit in one lune chart of S_a")
    return curve


def offcenter_circle(a: float, u0: float, r: float) -> Curve:
    """Geodesic circle of radius ``r`` about ``(u0, 0)`` avoiding both tips."""
    return star_curve(a, u0, lambda th: np.full_like(th, r))


def _max_lon(u0: float, r: float) -> float:
    s = math.sin(r) / math.cos(u0)
    return HALF_PI if s >= 1.0 else math.asin(s)


def _random_offcenter(rng, a):
    for _ in range(200):
        r = rng.uniform(0.1, 1.2)
        u0 = rng.uniform(-HALF_PI + r + 0.02, HALF_PI - r - 0.02) if r < HALF_PI - 0.05 else 0.0
        if abs(u0) + r < HALF_PI - 0.02 and _max_lon(u0, r) < 0.95 * math.pi * a:
            return u0, r
    raise RuntimeError("no admissible off-center circle")


def _random_offcenter_below(rng, a, b1):
    for _ in range(500):
        r = rng.uniform(0.1, 0.6)
        u0 = rng.uniform(-HALF_PI + r + 0.02, b1 - r - 0.02) if b1 - r - 0.02 > -HALF_PI + r + 0.02 else None
        if u0 is not None and _max_lon(u0, r) < 0.95 * math.pi * a:
            return u0, r
    raise RuntimeError("no admissible off-center circle below the cap")


def _random_star(rng, a):
    u0, r0 = _random_offcenter(rng, a)
    kmax = int(rng.integers(2, 6))
    k = np.arange(2, kmax + 1)
    amp = rng.uniform(-1.0, 1.0, len(k))
    amp *= rng.uniform(0.05, 0.25) / np.abs(amp).sum()
    ph = rng.uniform(0.0, 2.0 * math.pi, len(k))
    r_scale = 1.0 / (1.0 + np.abs(amp).sum())
    f = lambda th: r0 * r_scale * (1.0 + np.cos(np.multiply.outer(th, k) + ph) @ amp)
    return star_curve(a, u0, f), (u0, r0)


def _random_perturbed(rng):
    n = int(rng.integers(1, 5))
    b = rng.uniform(-1.2, 1.2)
    room = HALF_PI - abs(b) - 0.05
    amp = rng.uniform(-1.0, 1.0, n)
    amp *= min(room, rng.uniform(0.03, 0.3)) / np.abs(amp).sum()
    # no k = 1 mode: on the round sphere it is a first-order tilt of the cap
    amp = np.concatenate([[0.0], amp])
    return b, amp, rng.uniform(0.0, 2.0 * math.pi, n + 1)


@dataclass(frozen=True)
class IsoTestCurveFamily:
    """Seeded generator of test boundaries on ``S_a`` (``kind`` or ``"all"``)."""

    a: float
    seed: int
    kind: str = "all"
    n: int = 200

    def __post_init__(self):
        check_a(self.a)
        if self.kind != "all" and self.kind not in FAMILY_KINDS:
            raise ValueError(f"unknown family {self.kind!r}")

    def generate(self):
        """Yield ``(label, curves, equality_expected)``."""
        rng = np.random.default_rng([self.seed, int(round(self.a * 1e6))])
        kinds = FAMILY_KINDS if self.kind == "all" else (self.kind,)
        a = self.a
        for i in range(self.n):
            kind = kinds[i % len(kinds)]
            label = f"{kind}-{i}"
            if kind == "latitude":
                b = rng.uniform(-1.4, 1.4)
                yield label, [latitude_circle(b, reverse=bool(rng.integers(2)))], True
            elif kind == "perturbed-caps":
                b, amp, ph = _random_perturbed(rng)
                yield label, [perturbed_cap(b, amp, ph, reverse=bool(rng.integers(2)))], False
            elif kind == "off-center":
                u0, r = _random_offcenter(rng, a)
                # on the round sphere every geodesic circle is a cap about some axis
                yield label, [offcenter_circle(a, u0, r)], a == 1.0
            elif kind == "star-shaped":
                curve, _ = _random_star(rng, a)
                yield label, [curve], False
            else:
                b1 = rng.uniform(0.2, 1.3)
                if rng.integers(2):
                    b2 = rng.uniform(-1.3, b1 - 0.1)
                    parts = [latitude_circle(b1), latitude_circle(b2, reverse=True)]
                else:
                    # cap around the upper tip plus a circle below it
                    u0, r = _random_offcenter_below(rng, a, b1)
                    parts = [latitude_circle(b1), offcenter_circle(a, u0, r)]
                yield label, parts, False

    def check_all(self):
        return [check_curve(self.a, curves, label=label, equality_expected=eq) for label, curves, eq in self.generate()]


# regions on doubled polygons


def _vertex_clearance(W: SphericalPolygon, j: int) -> float:
    """Distance from vertex ``j`` to the edges not incident to it."""
    v = W.vertices
    n = len(v)
    normals = W.edge_normals()
    dist = math.inf
    for k in range(n):
        if k in (j, (j - 1) % n):
            continue
        nk = normals[k] / np.linalg.norm(normals[k])
        dist = min(dist, math.asin(min(1.0, abs(float(v[j] @ nk)))))
    return dist


def _inradius(W: SphericalPolygon):
    """Rough inscribed-disc centre and radius (centroid and distance to edges)."""
    c = W.vertices.sum(axis=0)
    c /= np.linalg.norm(c)
    normals = W.edge_normals()
    r = min(math.asin(float(c @ n) / np.linalg.norm(n)) for n in normals)
    return c, r


def polygon_family(W: SphericalPolygon, seed: int, n: int = 40):
    """Yield ``(label, parts)`` of regions on the double of ``W``."""
    rng = np.random.default_rng([seed, len(W.vertices)])
    nv = len(W.vertices)
    c, r_in = _inradius(W)
    kinds = ("corner-cap", "interior-disc", "halfspace", "multi")
    for i in range(n):
        kind = kinds[i % len(kinds)]
        label = f"{kind}-{i}"
        if kind == "corner-cap":
            j = int(rng.integers(nv))
            r = rng.uniform(0.25, 0.9) * _vertex_clearance(W, j)
            V = {"kind": "latitude-cap", "vertex": j, "b": HALF_PI - r}
            yield label, [DoubledRegion(build_region(W, V))]
        elif kind == "interior-disc":
            r = rng.uniform(0.2, 0.9) * r_in
            V = {"kind": "geodesic-disc", "center": c.tolist(), "radius": r}
            yield label, [DoubledRegion(build_region(W, V), doubled=False)]
        elif kind == "halfspace":
            normal = rng.normal(size=3)
            normal -= (normal @ c) * c
            normal /= np.linalg.norm(normal)
            off = rng.uniform(-0.6, 0.6) * math.sin(r_in)
            V = {"kind": "halfspace", "normal": normal.tolist(), "offset": off}
            yield label, [DoubledRegion(build_region(W, V))]
        else:
            # two corner caps at distinct vertices, each within half the clearance
            j1, j2 = (int(x) for x in rng.choice(nv, size=2, replace=False))
            parts = []
            for j in (j1, j2):
                r = rng.uniform(0.2, 0.45) * _vertex_clearance(W, j)
                V = {"kind": "latitude-cap", "vertex": j, "b": HALF_PI - r}
                parts.append(DoubledRegion(build_region(W, V)))
            yield label, parts


def polygon_min_relative_margin(W: SphericalPolygon, seed: int, n: int = 40) -> tuple[float, float]:
    """``(delta(W), min relative margin)`` over :func:`polygon_family`."""
    rel = min(check_doubled(W, parts).relative_margin for _, parts in polygon_family(W, seed, n))
    return delta_of_polygon(W), rel


def corner_angles_a(W: SphericalPolygon) -> np.ndarray:
    """Spindle parameters ``theta_j / pi`` of the tips of the double."""
    return interior_angles(W) / math.pi


def spindle_family(a: float, seed: int, kind: str = "all", n: int = 200):
    return IsoTestCurveFamily(a, seed, kind, n)
