"""Constant-curvature spindle surfaces and curves drawn on them.

A spindle with parameter ``0 < a <= 1`` is the surface of revolution

    (g(u), a cos(u) cos(v), a cos(u) sin(v)),   -pi/2 <= u <= pi/2,

with ``g(u) = int_0^u sqrt(1 - a^2 sin^2 t) dt``.  Its metric is
``du^2 + a^2 cos^2(u) dv^2``; it has curvature 1 away from the two conical
tips at ``u = +-pi/2`` and total area ``4*pi*a``.  ``a = 1`` is the unit
sphere.

Curves are given in the ``(u, v)`` chart.  The orientation convention is
that the enclosed region lies on the left of the direction of travel as
seen from outside the surface; a latitude circle traversed with ``v``
increasing therefore encloses the cap around the ``u = pi/2`` tip.
"""
from __future__ import annotations

from dataclasses import dataclass
import math
from typing import Callable, Optional

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicSpline

from .errors import NonFinite, OutOfRange, QuadratureFailure, SelfIntersection

__all__ = [
    "SpindleParam",
    "Cap",
    "SpindlePoint",
    "check_a",
    "profile_g",
    "profile_h",
    "tip_coordinate",
    "total_area",
    "cap_area",
    "cap_perimeter",
    "iso_profile",
    "cap_with_area",
    "lune_isometry",
    "gaussian_curvature",
    "Curve",
    "latitude_circle",
    "curve_length",
    "enclosed_area",
    "self_intersects",
]

HALF_PI = 0.5 * math.pi


def check_a(a: float) -> float:
    a = float(a)
    if not (0.0 < a <= 1.0):
        raise OutOfRange(f"spindle parameter a must lie in (0, 1], got {a}")
    return a


@dataclass(frozen=True)
class SpindleParam:
    a: float

    def __post_init__(self):
        check_a(self.a)

    @property
    def area(self) -> float:
        return 4.0 * math.pi * self.a


@dataclass(frozen=True)
class Cap:
    """The cap ``u >= b`` around the tip at ``u = pi/2``."""

    a: float
    b: float

    def __post_init__(self):
        check_a(self.a)
        if not (-HALF_PI < self.b < HALF_PI):
            raise OutOfRange(f"cap latitude b must lie in (-pi/2, pi/2), got {self.b}")

    @property
    def area(self) -> float:
        return cap_area(self)

    @property
    def perimeter(self) -> float:
        return cap_perimeter(self)


@dataclass(frozen=True)
class SpindlePoint:
    u: float
    v: float

    def __post_init__(self):
        if not (-HALF_PI <= self.u <= HALF_PI):
            raise OutOfRange(f"u must lie in [-pi/2, pi/2], got {self.u}")
        object.__setattr__(self, "v", float(self.v) % (2.0 * math.pi))


def profile_g(a: float, u: float, epsabs: float = 1e-13) -> float:
    """Axial profile ``g(u)``, by adaptive Gauss-Kronrod quadrature."""
    a = check_a(a)
    u = float(u)
    if abs(u) > HALF_PI * (1.0 + 1e-15):
        raise OutOfRange(f"|u| must not exceed pi/2, got {u}")
    if u == 0.0:
        return 0.0
    if a == 1.0:
        return math.sin(u)
    a2 = a * a
    val, err = integrate.quad(
        lambda t: math.sqrt(1.0 - a2 * math.sin(t) ** 2), 0.0, u, epsabs=epsabs, epsrel=0.0, limit=200
    )
    if err > 1e-12:
        raise QuadratureFailure(f"profile_g error estimate {err:.3g} exceeds 1e-12")
    return val


def profile_h(a: float, u):
    return check_a(a) * np.cos(u)


def tip_coordinate(a: float) -> float:
    """Axial position ``a* = g(pi/2)`` of the tip."""
    return profile_g(a, HALF_PI)


def total_area(a: float) -> float:
    return 4.0 * math.pi * check_a(a)


def cap_area(c: Cap) -> float:
    return 2.0 * math.pi * c.a * (1.0 - math.sin(c.b))


def cap_perimeter(c: Cap) -> float:
    return 2.0 * math.pi * c.a * math.cos(c.b)


def iso_profile(a: float, A: float) -> float:
    """Extremal perimeter ``sqrt(A (4 pi a - A))`` for enclosed area ``A``."""
    a = check_a(a)
    total = 4.0 * math.pi * a
    if not (0.0 < A < total):
        raise OutOfRange(f"area must lie in (0, {total}), got {A}")
    return math.sqrt(A * (total - A))


def cap_with_area(a: float, A: float) -> Cap:
    a = check_a(a)
    total = 4.0 * math.pi * a
    if not (0.0 < A < total):
        raise OutOfRange(f"area must lie in (0, {total}), got {A}")
    s = 1.0 - A / (2.0 * math.pi * a)
    return Cap(a, math.asin(min(1.0, max(-1.0, s))))


def lune_isometry(a: float, u_lune: float, v_lune: float) -> SpindlePoint:
    """Map a point of the lune ``0 <= lon <= pi*a`` (latitude ``u``) to the spindle."""
    a = check_a(a)
    if not (-HALF_PI <= u_lune <= HALF_PI) or not (0.0 <= v_lune <= math.pi * a):
        raise OutOfRange("lune point outside [-pi/2, pi/2] x [0, pi*a]")
    return SpindlePoint(u_lune, v_lune / a)


def gaussian_curvature(a: float, u) -> np.ndarray:
    """Curvature of the smooth part from the surface-of-revolution formula.

    ``K = x'(x'' r' - x' r'') / (r (x'^2 + r'^2)^2)`` for the profile
    ``(x, r) = (g, h)``.
    """
    a = check_a(a)
    u = np.asarray(u, dtype=float)
    s, c = np.sin(u), np.cos(u)
    root = np.sqrt(1.0 - a * a * s * s)
    x1 = root
    x2 = -a * a * s * c / root
    r = a * c
    r1 = -a * s
    r2 = -a * c
    return x1 * (x2 * r1 - x1 * r2) / (r * (x1 * x1 + r1 * r1) ** 2)


@dataclass
class Curve:
    """Parametric curve ``t -> (u(t), v(t))`` on ``t in [0, 1]``.

    ``deriv`` returns ``(u'(t), v'(t))``; when omitted it is approximated
    with a five-point central difference.  For a closed curve ``v(1)`` may
    differ from ``v(0)`` by a multiple of ``2*pi`` (winding around the
    axis).
    """

    point: Callable[[np.ndarray], tuple]
    deriv: Optional[Callable[[np.ndarray], tuple]] = None
    closed: bool = True
    breakpoints: tuple = ()

    def __call__(self, t):
        u, v = self.point(np.asarray(t, dtype=float))
        return np.asarray(u, dtype=float), np.asarray(v, dtype=float)

    def velocity(self, t):
        if self.deriv is not None:
            du, dv = self.deriv(np.asarray(t, dtype=float))
            return np.asarray(du, dtype=float), np.asarray(dv, dtype=float)
        t = np.asarray(t, dtype=float)
        h = 1e-4
        pts = [self(t + k * h) for k in (-2, -1, 1, 2)]
        du = (pts[0][0] - 8 * pts[1][0] + 8 * pts[2][0] - pts[3][0]) / (12 * h)
        dv = (pts[0][1] - 8 * pts[1][1] + 8 * pts[2][1] - pts[3][1]) / (12 * h)
        return du, dv

    def sample(self, n: int) -> np.ndarray:
        t = np.linspace(0.0, 1.0, n, endpoint=not self.closed)
        u, v = self(t)
        return np.column_stack([u, v])

    @classmethod
    def from_samples(cls, samples, closed: bool = True) -> "Curve":
        """Periodic cubic-spline interpolation of ``[[u, v], ...]`` samples."""
        pts = np.asarray(samples, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 4:
            raise ValueError("need at least four [u, v] samples")
        if not np.all(np.isfinite(pts)):
            raise NonFinite("non-finite sample")
        u = pts[:, 0]
        v = np.unwrap(pts[:, 1])
        if closed:
            wind = v[0] - v[-1]
            # angle increment closing the loop, wrapped into (-pi, pi]
            closing = (wind + math.pi) % (2.0 * math.pi) - math.pi
            v_end = v[-1] + closing
            turns = round((v_end - v[0]) / (2.0 * math.pi))
            shift = 2.0 * math.pi * turns
            t = np.linspace(0.0, 1.0, len(pts) + 1)
            su = CubicSpline(t, np.append(u, u[0]), bc_type="periodic")
            sv = CubicSpline(t, np.append(v - shift * t[:-1], v[0]), bc_type="periodic")
            point = lambda s: (su(s), sv(s) + shift * s)
            deriv = lambda s: (su(s, 1), sv(s, 1) + shift)
        else:
            t = np.linspace(0.0, 1.0, len(pts))
            su = CubicSpline(t, u)
            sv = CubicSpline(t, v)
            point = lambda s: (su(s), sv(s))
            deriv = lambda s: (su(s, 1), sv(s, 1))
        return cls(point=point, deriv=deriv, closed=closed, breakpoints=tuple(t[1:-1]))


def latitude_circle(b: float, reverse: bool = False) -> Curve:
    """The circle ``u = b``; forward orientation encloses the ``u > b`` cap."""
    sgn = -1.0 if reverse else 1.0
    two_pi = 2.0 * math.pi
    return Curve(
        point=lambda t: (np.full_like(t, b), sgn * two_pi * t),
        deriv=lambda t: (np.zeros_like(t), np.full_like(t, sgn * two_pi)),
    )


def _check_range(u) -> None:
    u = np.asarray(u)
    if not np.all(np.isfinite(u)) or np.any(np.abs(u) > HALF_PI * (1.0 + 1e-12)):
        raise NonFinite("curve leaves the coordinate range |u| <= pi/2")


def _quad(f, lo, hi, points, epsabs, limit=400):
    pts = [p for p in points if lo < p < hi] or None
    val, err = integrate.quad(f, lo, hi, points=pts, epsabs=epsabs, epsrel=1e-13, limit=limit)
    return val, err


def curve_length(a: float, curve: Curve, t0: float = 0.0, t1: float = 1.0) -> float:
    """Length of ``curve`` in the metric ``du^2 + a^2 cos^2(u) dv^2``."""
    a = check_a(a)
    _check_range(curve(np.linspace(t0, t1, 257))[0])

    def speed(t):
        u, _ = curve(t)
        du, dv = curve.velocity(t)
        return float(np.sqrt(du * du + (a * np.cos(u) * dv) ** 2))

    val, err = _quad(speed, t0, t1, curve.breakpoints, epsabs=1e-11)
    if not math.isfinite(val) or err > 1e-9 * (1.0 + abs(val)):
        raise QuadratureFailure(f"length quadrature error {err:.3g} too large")
    return val


def self_intersects(a: float, curve: Curve, n: int = 512) -> bool:
    """Segment-pair test on an ``n``-point polygonal resampling.

    Segments are compared in a polar chart centred on the tip the curve
    stays furthest from, where the chart is injective.
    """
    t = np.linspace(0.0, 1.0, n + 1)
    u, v = curve(t)
    dist_n = HALF_PI - u.max()
    dist_s = u.min() + HALF_PI
    r = HALF_PI + u if dist_s > dist_n else HALF_PI - u
    x = np.column_stack([r * np.cos(v), r * np.sin(v)])
    p = x[:-1]
    q = x[1:]
    d = q - p
    m = len(p)
    # pairwise orientation tests
    def orient(a_, b_, c_):
        return (b_[..., 0] - a_[..., 0]) * (c_[..., 1] - a_[..., 1]) - (b_[..., 1] - a_[..., 1]) * (c_[..., 0] - a_[..., 0])

    P1 = p[:, None, :]
    Q1 = q[:, None, :]
    P2 = p[None, :, :]
    Q2 = q[None, :, :]
    o1 = orient(P1, Q1, P2)
    o2 = orient(P1, Q1, Q2)
    o3 = orient(P2, Q2, P1)
    o4 = orient(P2, Q2, Q1)
    hit = (o1 * o2 < 0) & (o3 * o4 < 0)
    i, j = np.nonzero(hit)
    adjacent = (np.abs(i - j) <= 1) | (curve.closed & (np.abs(i - j) == m - 1))
    return bool(np.any(~adjacent))


def enclosed_area(a: float, curve: Curve, check_simple: bool = True) -> float:
    """Area of the region to the left of a simple closed curve.

    Uses the flux form ``A = closed-integral(-a sin(u) dv)`` corrected by
    ``2*pi*a`` when the curve winds once around the axis (the enclosed
    region then contains exactly one tip), or by ``4*pi*a`` when it winds
    zero times but encloses both tips.
    """
    a = check_a(a)
    if not curve.closed:
        raise ValueError("enclosed_area needs a closed curve")
    u_s, v_s = curve(np.linspace(0.0, 1.0, 513))
    _check_range(u_s)
    if np.any(HALF_PI - np.abs(u_s) < 1e-12):
        raise NonFinite("curve passes through a tip")
    if abs(u_s[-1] - u_s[0]) > 1e-9:
        raise ValueError("curve is not closed in u")
    turns = (v_s[-1] - v_s[0]) / (2.0 * math.pi)
    winding = round(turns)
    if abs(turns - winding) > 1e-9 or abs(winding) > 1:
        raise ValueError("curve is not a simple closed curve (v winding)")
    if check_simple and self_intersects(a, curve):
        raise SelfIntersection("curve self-intersects")

    def flux(t):
        u, _ = curve(t)
        _, dv = curve.velocity(t)
        return float(-a * np.sin(u) * dv)

    val, err = _quad(flux, 0.0, 1.0, curve.breakpoints, epsabs=1e-12)
    if err > 1e-9 * (1.0 + abs(val)):
        raise QuadratureFailure(f"area quadrature error {err:.3g} too large")
    total = 4.0 * math.pi * a
    if winding != 0:
        return val + 2.0 * math.pi * a
    return val if val > 0 else total + val
