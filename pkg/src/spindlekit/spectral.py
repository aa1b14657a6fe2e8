"""First Dirichlet eigenvalue of spherical caps by shooting.

For the cap ``u >= b`` a rotationally symmetric eigenfunction solves

    (cos(u) w')' + lam cos(u) w = 0,    w(b) = 0,  w bounded at u = pi/2.

In the polar distance ``s = pi/2 - u`` this is ``(sin(s) w')' + lam sin(s) w = 0``
on ``(0, s_end]`` with ``s_end = pi/2 - b``.  ``s = 0`` is a regular
singular point, so integration starts at a small ``s0`` from the regular
Frobenius series and proceeds with fixed-step RK4.  The eigenvalue is
bracketed by the zero count of ``w`` and polished with Brent's method.
"""
from __future__ import annotations

from dataclasses import dataclass
import math

import numba
import numpy as np
from scipy import optimize

from .errors import NegativeEigenvalue, NoConvergence, OutOfRange
from .spindle import cap_with_area, check_a

__all__ = [
    "EigenResult",
    "CharExponent",
    "CapEigenProblem",
    "frobenius_start",
    "shoot",
    "eigenfunction",
    "cap_eigenvalue_h",
    "cap_eigenvalue",
    "char_exponent",
    "bkp_sum",
    "faber_krahn_bound",
    "substitution_residual",
]

B_MIN = -0.5 * math.pi + 1e-6
B_MAX = 0.5 * math.pi - 1e-3
LAMBDA_CEILING = 1e7
DEFAULT_STEP = 1e-4


@dataclass(frozen=True)
class EigenResult:
    value: float
    method: str
    discretization: float
    error_estimate: float

    def __post_init__(self):
        if self.value < 0.0:
            raise NegativeEigenvalue(f"eigenvalue {self.value} < 0")
        if not self.error_estimate > 0.0:
            raise ValueError("error_estimate must be positive")


@dataclass(frozen=True)
class CharExponent:
    alpha: float
    value: float


@dataclass(frozen=True)
class CapEigenProblem:
    b: float
    tol: float = 1e-9
    max_bisections: int = 200

    def __post_init__(self):
        if not (B_MIN < self.b < B_MAX):
            raise OutOfRange(f"b must lie in ({B_MIN:.6f}, {B_MAX:.6f}), got {self.b}")
        if not self.tol > 0.0:
            raise ValueError("tol must be positive")

    def solve(self) -> EigenResult:
        return cap_eigenvalue(self.b, self.tol, max_bisections=self.max_bisections)


def frobenius_start(lam: float, s: float) -> tuple[float, float]:
    """Regular solution ``w`` and ``dw/ds`` near ``s = 0``, normalized ``w(0) = 1``.

    Series in ``z = sin^2(s/2)``: ``c_{k+1} = c_k (k(k+1) - lam) / (k+1)^2``.
    """
    z = math.sin(0.5 * s) ** 2
    w = 0.0
    dw_dz = 0.0
    c = 1.0
    zk = 1.0
    for k in range(200):
        w += c * zk
        c_next = c * (k * (k + 1) - lam) / ((k + 1) ** 2)
        dw_dz += c_next * (k + 1) * zk
        c = c_next
        zk *= z
        if abs(c * zk) < 1e-18 * max(1.0, abs(w)) and k > 2:
            break
    return w, dw_dz * 0.5 * math.sin(s)


@numba.njit(cache=True)
def _rk4(lam, s0, w0, p0, s_end, n):
    h = (s_end - s0) / n
    w = w0
    p = p0
    changes = 0
    s = s0
    for i in range(n):
        # y' = (p, -cot(s) p - lam w)
        c1 = math.cos(s) / math.sin(s)
        k1w = p
        k1p = -c1 * p - lam * w
        sm = s + 0.5 * h
        cm = math.cos(sm) / math.sin(sm)
        k2w = p + 0.5 * h * k1p
        k2p = -cm * (p + 0.5 * h * k1p) - lam * (w + 0.5 * h * k1w)
        k3w = p + 0.5 * h * k2p
        k3p = -cm * (p + 0.5 * h * k2p) - lam * (w + 0.5 * h * k2w)
        se = s0 + (i + 1) * h
        ce = math.cos(se) / math.sin(se)
        k4w = p + h * k3p
        k4p = -ce * (p + h * k3p) - lam * (w + h * k3w)
        w_new = w + h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)
        p = p + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        if i < n - 1 and w_new * w < 0.0:
            changes += 1
        w = w_new
        s = se
    return w, p, changes


@numba.njit(cache=True)
def _rk4_path(lam, s0, w0, p0, s_end, n):
    h = (s_end - s0) / n
    ws = np.empty(n + 1)
    ps = np.empty(n + 1)
    ws[0] = w0
    ps[0] = p0
    w = w0
    p = p0
    s = s0
    for i in range(n):
        c1 = math.cos(s) / math.sin(s)
        k1w = p
        k1p = -c1 * p - lam * w
        sm = s + 0.5 * h
        cm = math.cos(sm) / math.sin(sm)
        k2w = p + 0.5 * h * k1p
        k2p = -cm * (p + 0.5 * h * k1p) - lam * (w + 0.5 * h * k1w)
        k3w = p + 0.5 * h * k2p
        k3p = -cm * (p + 0.5 * h * k2p) - lam * (w + 0.5 * h * k2w)
        se = s0 + (i + 1) * h
        ce = math.cos(se) / math.sin(se)
        k4w = p + h * k3p
        k4p = -ce * (p + h * k3p) - lam * (w + h * k3w)
        w = w + h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)
        p = p + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        s = se
        ws[i + 1] = w
        ps[i + 1] = p
    return ws, ps


def _grid(b: float, h: float) -> tuple[float, float, int]:
    s_end = 0.5 * math.pi - b
    s0 = min(0.05, 0.25 * s_end)
    # small caps: shrink the step with the interval so the relative resolution is unchanged
    step = h * min(1.0, s_end / (0.5 * math.pi))
    n = max(200, int(math.ceil((s_end - s0) / step)))
    return s0, s_end, n


def shoot(lam: float, b: float, h: float = DEFAULT_STEP) -> tuple[float, int]:
    """Value ``w(b)`` of the regular solution and its interior sign-change count."""
    s0, s_end, n = _grid(b, h)
    w0, p0 = frobenius_start(lam, s0)
    w, _, changes = _rk4(float(lam), s0, w0, p0, s_end, n)
    return w, changes


def eigenfunction(lam: float, b: float, h: float = DEFAULT_STEP):
    """Samples ``(s, w, dw/ds)`` of the regular solution on the shooting grid."""
    s0, s_end, n = _grid(b, h)
    w0, p0 = frobenius_start(lam, s0)
    ws, ps = _rk4_path(float(lam), s0, w0, p0, s_end, n)
    return np.linspace(s0, s_end, n + 1), ws, ps


def _check_b(b: float) -> float:
    b = float(b)
    if not (B_MIN < b < B_MAX):
        raise OutOfRange(f"b must lie in ({B_MIN:.6f}, {B_MAX:.6f}), got {b}")
    return b


def cap_eigenvalue_h(
    b: float, h: float = DEFAULT_STEP, bracket=None, max_bisections: int = 200
) -> float:
    """Eigenvalue for a single fixed step ``h`` (no extrapolation)."""
    b = _check_b(b)

    def below(lam):
        w, changes = shoot(lam, b, h)
        return changes == 0 and w > 0.0

    if bracket is None:
        guess = 2.0 / (1.0 - math.sin(b))
        lo, hi = 0.5 * guess, 2.0 * guess
    else:
        lo, hi = bracket
    for _ in range(60):
        if below(lo):
            break
        lo *= 0.5
    else:
        raise NoConvergence("could not bracket the eigenvalue from below")
    while below(hi):
        hi *= 2.0
        if hi > LAMBDA_CEILING:
            raise NoConvergence(f"no eigenvalue below {LAMBDA_CEILING}")
    # shrink until the upper end has a single sign change, at the endpoint
    for _ in range(max_bisections):
        w_hi, ch_hi = shoot(hi, b, h)
        if ch_hi == 0 and w_hi < 0.0:
            break
        mid = 0.5 * (lo + hi)
        if below(mid):
            lo = mid
        else:
            hi = mid
    else:
        raise NoConvergence("bisection did not isolate the first eigenvalue")
    return optimize.brentq(lambda lam: shoot(lam, b, h)[0], lo, hi, xtol=1e-15, rtol=1e-15, maxiter=200)


def cap_eigenvalue(
    b: float, tol: float = 1e-9, h: float = DEFAULT_STEP, max_bisections: int = 200
) -> EigenResult:
    """First Dirichlet eigenvalue of the cap ``u >= b`` (any spindle, or the sphere).

    Runs the shooting at steps ``h`` and ``h/2`` and Richardson-extrapolates
    with the RK4 order.
    """
    lam_h = cap_eigenvalue_h(b, h, max_bisections=max_bisections)
    lam_h2 = cap_eigenvalue_h(b, 0.5 * h, bracket=(lam_h * (1 - 1e-6), lam_h * (1 + 1e-6)))
    diff = (lam_h2 - lam_h) / 15.0
    value = lam_h2 + diff
    err = max(abs(diff), 1e-13 * value, 4.0 * np.finfo(float).eps)
    # tol is absolute for eigenvalues up to 1 and relative above
    if err > tol * max(1.0, value):
        raise NoConvergence(f"error estimate {err:.3g} exceeds tol {tol:.3g}")
    return EigenResult(value=value, method="shooting", discretization=0.5 * h, error_estimate=err)


def substitution_residual(lam: float, b: float, h: float = DEFAULT_STEP) -> tuple[float, float]:
    """Max of ``|(sin s w')' + lam sin s w|`` (five-point differences) and ``max|w|``."""
    s, w, p = eigenfunction(lam, b, h)
    step = s[1] - s[0]
    flux = np.sin(s) * p
    d = (flux[:-4] - 8 * flux[1:-3] + 8 * flux[3:-1] - flux[4:]) / (12 * step)
    r = np.abs(d + lam * np.sin(s[2:-2]) * w[2:-2])
    return float(r.max()), float(np.abs(w).max())


def char_exponent(eig: float) -> CharExponent:
    if eig < 0.0:
        raise NegativeEigenvalue(f"eigenvalue {eig} < 0")
    alpha = -0.5 + math.sqrt(0.25 + eig)
    return CharExponent(alpha=alpha, value=float(eig))


def bkp_sum(b: float, tol: float = 1e-9) -> float:
    """Sum of characteristic exponents of the caps ``u >= b`` and ``u >= -b``."""
    if abs(b) >= B_MAX:
        raise OutOfRange(f"|b| must be below {B_MAX:.6f}")
    lam1 = cap_eigenvalue(b, tol).value
    lam2 = lam1 if b == 0.0 else cap_eigenvalue(-b, tol).value
    return char_exponent(lam1).alpha + char_exponent(lam2).alpha


def faber_krahn_bound(a: float, A: float, tol: float = 1e-9) -> EigenResult:
    """Lower bound for the first Dirichlet eigenvalue of any region of area ``A``.

    It is the eigenvalue of the cap of the same area on the spindle with
    parameter ``a``, which depends only on the cap latitude ``b``.
    """
    check_a(a)
    cap = cap_with_area(a, A)
    return cap_eigenvalue(cap.b, tol)
