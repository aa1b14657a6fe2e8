"""Quartic C^2 smoothing of the conical tips of a spindle.

Near a tip the spindle is written as a graph over the distance ``rho``
from the rotation axis: ``(w(rho), rho cos v, rho sin v)`` with
``w(rho) = a* - g(arccos(rho / a))`` the height above the tip.  On
``0 <= rho <= eps`` the graph is replaced by ``b0 + b1 rho^2 + b2 rho^4``,
matched to ``w`` up to second derivatives at ``rho = eps``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np
from scipy import integrate

from .errors import EpsilonTooLarge, OutOfRange, QuadratureFailure
from .spindle import check_a, profile_g, tip_coordinate

__all__ = [
    "TipProfile",
    "SmoothedTipProfile",
    "tip_profile_w",
    "tip_profile_derivatives",
    "smoothing_coeffs",
    "smooth_tip",
    "smoothed_curvature",
    "SignReport",
    "sign_conditions",
    "tip_curvature_mass",
    "tip_area",
    "total_curvature_smoothed",
    "smoothed_surface_area",
    "curvature_budget",
    "calibrate_budget_constant",
]

K_MATCH_TOL = 1e-6


@dataclass(frozen=True)
class TipProfile:
    a: float

    def __post_init__(self):
        check_a(self.a)

    def __call__(self, rho: float) -> float:
        return tip_profile_w(self.a, rho)

    @property
    def slope_at_tip(self) -> float:
        """Right derivative of ``w`` at the tip, ``sqrt(1 - a^2) / a``."""
        return math.sqrt(1.0 - self.a * self.a) / self.a


def tip_profile_w(a: float, rho: float) -> float:
    a = check_a(a)
    if not (0.0 <= rho <= a):
        raise OutOfRange(f"radius must lie in [0, {a}], got {rho}")
    u = math.acos(min(1.0, rho / a))
    return tip_coordinate(a) - profile_g(a, u)


def tip_profile_derivatives(a: float, rho: float) -> tuple[float, float]:
    """Exact ``w'(rho)`` and ``w''(rho)`` by the chain rule through ``u``."""
    a = check_a(a)
    if not (0.0 < rho < a):
        raise OutOfRange(f"radius must lie in (0, {a}), got {rho}")
    u = math.acos(rho / a)
    s, c = math.sin(u), math.cos(u)
    root = math.sqrt(1.0 - a * a * s * s)
    w1 = root / (a * s)
    w2 = c / (a * a * s**3 * root)
    return w1, w2


@dataclass(frozen=True)
class SmoothedTipProfile:
    a: float
    eps: float
    b0: float
    b1: float
    b2: float
    matching_residuals: tuple = field(default=(), compare=False)

    def w(self, rho):
        rho = np.asarray(rho, dtype=float)
        return self.b0 + self.b1 * rho**2 + self.b2 * rho**4

    def w1(self, rho):
        rho = np.asarray(rho, dtype=float)
        return 2.0 * self.b1 * rho + 4.0 * self.b2 * rho**3

    def w2(self, rho):
        rho = np.asarray(rho, dtype=float)
        return 2.0 * self.b1 + 12.0 * self.b2 * rho**2

    def w3(self, rho):
        return 24.0 * self.b2 * np.asarray(rho, dtype=float)

    def curvature(self, rho):
        return smoothed_curvature(self, rho)


def smoothing_coeffs(a: float, eps: float) -> tuple[float, float, float]:
    a = check_a(a)
    if not (0.0 < eps < a):
        raise EpsilonTooLarge(f"eps must lie in (0, a={a}), got {eps}")
    w = tip_profile_w(a, eps)
    w1, w2 = tip_profile_derivatives(a, eps)
    b0 = (8.0 * w - 5.0 * w1 * eps + w2 * eps * eps) / 8.0
    b1 = (3.0 * w1 - w2 * eps) / (4.0 * eps)
    b2 = (-w1 + w2 * eps) / (8.0 * eps**3)
    return b0, b1, b2


def smoothed_curvature(s: SmoothedTipProfile, rho):
    rho = np.asarray(rho, dtype=float)
    r2 = rho * rho
    num = (2.0 * s.b1 + 4.0 * s.b2 * r2) * (2.0 * s.b1 + 12.0 * s.b2 * r2)
    slope = 2.0 * s.b1 * rho + 4.0 * s.b2 * rho * r2
    return num / (1.0 + slope * slope) ** 2


@dataclass(frozen=True)
class SignReport:
    slope_positive: bool
    third_negative: bool
    second_bounded: bool
    curvature_monotone: bool
    first_violation: str | None
    where: float | None

    @property
    def ok(self) -> bool:
        return self.first_violation is None


def sign_conditions(s: SmoothedTipProfile, n: int = 10_000) -> SignReport:
    """Check ``w' > 0``, ``w''' < 0`` and ``w'' >= w''(eps) > 0`` on ``(0, eps]``.

    Also checks that the curvature is non-increasing on the grid.
    """
    rho = np.linspace(0.0, s.eps, n + 1)[1:]
    w2_eps = float(s.w2(s.eps))
    checks = [
        ("w' > 0", s.w1(rho) > 0.0),
        ("w''' < 0", s.w3(rho) < 0.0),
        ("w'' >= w''(eps) > 0", (s.w2(rho) >= w2_eps * (1.0 - 1e-12)) & (w2_eps > 0.0)),
    ]
    K = smoothed_curvature(s, np.concatenate([[0.0], rho]))
    dK = np.diff(K)
    checks.append(("K non-increasing", np.concatenate([dK <= 1e-12 * abs(K[0]), [True]])))
    flags = [bool(np.all(ok)) for _, ok in checks]
    first, where = None, None
    for (name, ok), flag in zip(checks, flags):
        if not flag:
            first = name
            where = float(rho[int(np.argmin(ok))])
            break
    return SignReport(*flags, first_violation=first, where=where)


def smooth_tip(a: float, eps: float) -> SmoothedTipProfile:
    """Build the smoothed profile, rejecting ``eps`` outside the working regime.

    ``eps`` is accepted only when the sign conditions hold on a dense grid
    and the curvature at ``rho = eps`` matches 1 within ``K_MATCH_TOL``.
    """
    b0, b1, b2 = smoothing_coeffs(a, eps)
    w = tip_profile_w(a, eps)
    w1, w2 = tip_profile_derivatives(a, eps)
    probe = SmoothedTipProfile(a, eps, b0, b1, b2)
    res = (
        abs(float(probe.w(eps)) - w),
        abs(float(probe.w1(eps)) - w1),
        abs(float(probe.w2(eps)) - w2),
    )
    s = SmoothedTipProfile(a, eps, b0, b1, b2, matching_residuals=res)
    if not (b1 > 0.0 and b2 < 0.0):
        raise EpsilonTooLarge(f"sign conditions b1 > 0 > b2 fail for eps={eps}")
    if abs(float(smoothed_curvature(s, eps)) - 1.0) > K_MATCH_TOL:
        raise EpsilonTooLarge(f"K(eps) != 1 for eps={eps}")
    rep = sign_conditions(s, n=2000)
    if not rep.ok:
        raise EpsilonTooLarge(f"{rep.first_violation} fails at rho={rep.where:.3g} for eps={eps}")
    return s


def _u_eps(a: float, eps: float) -> float:
    return math.acos(eps / a)


def tip_curvature_mass(s: SmoothedTipProfile) -> float:
    """Integral of the curvature over one smoothed tip region ``rho <= eps``."""

    def f(rho):
        w1 = float(s.w1(rho))
        return float(smoothed_curvature(s, rho)) * 2.0 * math.pi * rho * math.sqrt(1.0 + w1 * w1)

    val, err = integrate.quad(f, 0.0, s.eps, epsabs=1e-13, epsrel=1e-12, limit=200)
    if err > 1e-9:
        raise QuadratureFailure(f"tip curvature quadrature error {err:.3g}")
    return val


def tip_area(s: SmoothedTipProfile) -> float:
    def f(rho):
        w1 = float(s.w1(rho))
        return 2.0 * math.pi * rho * math.sqrt(1.0 + w1 * w1)

    val, err = integrate.quad(f, 0.0, s.eps, epsabs=1e-14, epsrel=1e-12, limit=200)
    if err > 1e-9:
        raise QuadratureFailure(f"tip area quadrature error {err:.3g}")
    return val


def _unsmoothed_part_area(a: float, eps: float) -> float:
    """Area of the spindle with both radial ``eps``-neighbourhoods of the tips removed."""
    return 4.0 * math.pi * a * math.sin(_u_eps(a, eps))


def total_curvature_smoothed(a: float, eps: float) -> float:
    """Total curvature of the smoothed closed surface (4*pi by Gauss-Bonnet)."""
    a = check_a(a)
    if a == 1.0:
        return 4.0 * math.pi  # round sphere: nothing to smooth
    s = smooth_tip(a, eps)
    return _unsmoothed_part_area(a, eps) + 2.0 * tip_curvature_mass(s)


def smoothed_surface_area(a: float, eps: float) -> float:
    a = check_a(a)
    if a == 1.0:
        return 4.0 * math.pi
    s = smooth_tip(a, eps)
    return _unsmoothed_part_area(a, eps) + 2.0 * tip_area(s)


def curvature_budget(area: float, tip_angles, eps: float, c_hat: float) -> float:
    """Upper bound ``area + 2 sum(pi - theta_j) + c_hat * eps`` on total curvature."""
    th = np.asarray(tip_angles, dtype=float).ravel()
    if np.any((th <= 0.0) | (th >= math.pi)):
        raise OutOfRange("tip angles must lie in (0, pi)")
    return float(area + 2.0 * np.sum(math.pi - th) + c_hat * eps)


def calibrate_budget_constant(a_grid, eps_grid, safety: float = 2.0) -> dict:
    """Empirical constant for the tip-budget and area estimates.

    Returns ``safety`` times the largest observed ratio
    ``excess / eps`` over the grid, for the curvature excess of one tip over
    ``2*pi*(1 - a)`` and for the surface-area defect ``|Area - 4*pi*a|``.
    """
    mass_ratio = 0.0
    area_ratio = 0.0
    for a in a_grid:
        for eps in eps_grid:
            s = smooth_tip(a, eps)
            mass = tip_curvature_mass(s)
            mass_ratio = max(mass_ratio, (mass - 2.0 * math.pi * (1.0 - a)) / eps)
            area_ratio = max(area_ratio, abs(smoothed_surface_area(a, eps) - 4.0 * math.pi * a) / eps)
    return {"tip_mass": safety * mass_ratio, "area": safety * area_ratio}
