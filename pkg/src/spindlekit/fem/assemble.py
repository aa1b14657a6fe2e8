"""P1 stiffness and mass matrices on flat triangles with spherical vertices."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from ..errors import DegenerateTriangle
from .mesh import SurfaceMesh

__all__ = ["AssembledSystem", "element_matrices", "assemble"]


@dataclass(frozen=True)
class AssembledSystem:
    stiffness: sparse.csr_matrix
    mass: sparse.csr_matrix
    free: np.ndarray
    h: float

    def restricted(self) -> tuple[sparse.csc_matrix, sparse.csc_matrix]:
        f = self.free
        return self.stiffness[f][:, f].tocsc(), self.mass[f][:, f].tocsc()


def element_matrices(p: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    """Stiffness (cotangent form), consistent mass and area of one flat triangle.

    ``p`` has shape (3, 3): the vertex coordinates.
    """
    K, M, area = _batch(p[None])
    return K[0], M[0], float(area[0])


def _batch(v: np.ndarray):
    e0 = v[:, 2] - v[:, 1]  # edge opposite vertex 0
    e1 = v[:, 0] - v[:, 2]
    e2 = v[:, 1] - v[:, 0]
    area = 0.5 * np.linalg.norm(np.cross(e2, -e1), axis=1)
    if np.any(area <= 1e-14 * np.einsum("ij,ij->i", e2, e2)):
        raise DegenerateTriangle("triangle with (near-)zero area")
    E = np.stack([e0, e1, e2], axis=1)
    # gradients of barycentrics are rot(e_i)/(2A); K_ij = e_i . e_j / (4A)
    K = np.einsum("tik,tjk->tij", E, E) / (4.0 * area)[:, None, None]
    base = np.array([[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]]) / 12.0
    M = base[None] * area[:, None, None]
    return K, M, area


def assemble(mesh: SurfaceMesh) -> AssembledSystem:
    tri = mesh.triangles
    K, M, _ = _batch(mesh.vertices[tri])
    rows = np.repeat(tri, 3, axis=1).ravel()
    cols = np.tile(tri, (1, 3)).ravel()
    n = mesh.n_vertices
    S = sparse.coo_matrix((K.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    Mm = sparse.coo_matrix((M.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    # exact symmetrization (summation order can differ in the last bit)
    S = 0.5 * (S + S.T)
    Mm = 0.5 * (Mm + Mm.T)
    return AssembledSystem(stiffness=S.tocsr(), mass=Mm.tocsr(), free=mesh.free_vertices(), h=mesh.h)
