"""Smallest mixed Dirichlet-Neumann eigenvalue by inverse iteration."""
from __future__ import annotations

import math

import numpy as np
from scipy.sparse import linalg as spla

from ..errors import PremiseViolated, SolverStagnation
from ..spectral import EigenResult
from .assemble import AssembledSystem, assemble
from .mesh import mesh_region

__all__ = ["smallest_eigenvalue", "dn_eigenvalue", "rayleigh_quotient"]


def rayleigh_quotient(sys: AssembledSystem, x: np.ndarray) -> float:
    A, B = sys.restricted()
    return float(x @ (A @ x)) / float(x @ (B @ x))


def smallest_eigenvalue(sys: AssembledSystem, tol: float = 1e-8, max_iter: int = 2000, return_vector: bool = False):
    """Inverse power iteration (shift 0) from the all-ones vector."""
    if len(sys.free) == sys.stiffness.shape[0]:
        raise PremiseViolated("no Dirichlet vertices: the smallest eigenvalue is 0")
    A, B = sys.restricted()
    lu = spla.splu(A)
    x = np.ones(A.shape[0])
    x /= math.sqrt(x @ (B @ x))
    lam = float(x @ (A @ x))
    for it in range(max_iter):
        y = lu.solve(B @ x)
        x = y / math.sqrt(y @ (B @ y))
        Ax = A @ x
        Bx = B @ x
        lam = float(x @ Ax)
        res = np.linalg.norm(Ax - lam * Bx) / (abs(lam) * np.linalg.norm(Bx))
        if res <= tol:
            break
    else:
        raise SolverStagnation(f"inverse iteration did not reach residual {tol:g} in {max_iter} steps")
    result = EigenResult(value=lam, method="fem", discretization=sys.h, error_estimate=max(res * lam, 1e-16))
    if return_vector:
        full = np.zeros(sys.stiffness.shape[0])
        full[sys.free] = x
        return result, full
    return result


def dn_eigenvalue(W, V: dict | None = None, h: float = 0.05, tol: float = 1e-8, dirichlet=None, neumann=None) -> EigenResult:
    """Mixed eigenvalue of ``V`` inside ``W`` at mesh size ``h``.

    The error estimate is ``|mu_h - mu_2h| / 3`` (second-order convergence);
    the reported value is the fine-mesh ``mu_h``.
    """
    from ..regions import build_region

    region = build_region(W, V, dirichlet=dirichlet, neumann=neumann)
    fine = smallest_eigenvalue(assemble(mesh_region(region, h=h)), tol)
    coarse_h = min(2.0 * h, 0.29)
    coarse = smallest_eigenvalue(assemble(mesh_region(region, h=coarse_h)), tol)
    err = max(abs(fine.value - coarse.value) / 3.0, fine.error_estimate)
    return EigenResult(value=fine.value, method="fem", discretization=h, error_estimate=err)
