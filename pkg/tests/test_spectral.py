import math

import mpmath
import numpy as np
import pytest

from spindlekit.errors import NegativeEigenvalue, OutOfRange
from spindlekit.spectral import (
    CapEigenProblem,
    EigenResult,
    bkp_sum,
    cap_eigenvalue,
    cap_eigenvalue_h,
    char_exponent,
    faber_krahn_bound,
    frobenius_start,
    substitution_residual,
)
from spindlekit.spindle import cap_with_area


def legendre_root(b: float, nu0: float) -> float:
    """Degree nu with P_nu(sin b) = 0, i.e. the cap eigenvalue nu (nu + 1)."""
    mpmath.mp.dps = 30
    nu = mpmath.findroot(lambda n: mpmath.legenp(n, 0, mpmath.sin(b)), nu0)
    return float(nu * (nu + 1))


def test_hemisphere_is_two():
    assert cap_eigenvalue(0.0).value == pytest.approx(2.0, abs=1e-8)


@pytest.mark.parametrize("b", [-1.2, -0.5, 0.3, 0.9, 1.3])
def test_matches_legendre_roots(b):
    r = cap_eigenvalue(b)
    exact = legendre_root(b, char_exponent(r.value).alpha)
    assert r.value == pytest.approx(exact, rel=1e-10)
    assert abs(r.value - exact) <= 10 * r.error_estimate + 1e-12


def test_frobenius_start_matches_legendre_function():
    lam = 3.7
    nu = -0.5 + math.sqrt(0.25 + lam)
    for s in (0.01, 0.05):
        w, dw = frobenius_start(lam, s)
        assert w == pytest.approx(float(mpmath.legenp(nu, 0, math.cos(s))), rel=1e-13)
        d = float(mpmath.diff(lambda x: mpmath.legenp(nu, 0, mpmath.cos(x)), s))
        assert dw == pytest.approx(d, rel=1e-10)


def test_rk4_convergence_order():
    b = -0.5
    exact = legendre_root(b, 0.6)
    errs = [abs(cap_eigenvalue_h(b, h) - exact) for h in (0.008, 0.004, 0.002)]
    orders = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
    assert all(3.5 < p < 4.5 for p in orders), orders


def test_monotone_in_latitude():
    vals = [cap_eigenvalue(b).value for b in np.linspace(-1.3, 1.3, 9)]
    assert all(x < y for x, y in zip(vals, vals[1:]))


def test_substitution_residual_small():
    lam = cap_eigenvalue(0.4).value
    res, wmax = substitution_residual(lam, 0.4)
    assert res <= 1e-8 * max(1.0, wmax)


def test_char_exponent_and_bkp():
    assert char_exponent(2.0).alpha == pytest.approx(1.0)
    assert char_exponent(6.0).alpha == pytest.approx(2.0)
    with pytest.raises(NegativeEigenvalue):
        char_exponent(-1.0)
    assert bkp_sum(0.0) == pytest.approx(2.0, abs=1e-10)
    for b in (0.2, 0.8):
        assert bkp_sum(b) == pytest.approx(bkp_sum(-b), abs=1e-9)
        assert bkp_sum(b) > 2.0


def test_faber_krahn_bound_depends_only_on_latitude():
    A = 0.8
    r = faber_krahn_bound(0.5, A)
    assert r.value == pytest.approx(cap_eigenvalue(cap_with_area(0.5, A).b).value, rel=1e-12)


def test_errors_and_problem_wrapper():
    with pytest.raises(OutOfRange):
        cap_eigenvalue(1.6)
    with pytest.raises(OutOfRange):
        CapEigenProblem(b=-2.0)
    r = CapEigenProblem(b=0.0).solve()
    assert isinstance(r, EigenResult) and r.method == "shooting" and r.error_estimate > 0
    with pytest.raises(NegativeEigenvalue):
        EigenResult(value=-1.0, method="fem", discretization=0.1, error_estimate=1.0)
