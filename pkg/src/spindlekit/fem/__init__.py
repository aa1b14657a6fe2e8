"""Surface finite elements for mixed Dirichlet-Neumann eigenvalues on the sphere."""
from .assemble import AssembledSystem, assemble, element_matrices
from .mesh import SurfaceMesh, fibonacci_sphere, icosphere, mesh_region, triangle_angles
from .solver import dn_eigenvalue, rayleigh_quotient, smallest_eigenvalue

__all__ = [
    "AssembledSystem",
    "SurfaceMesh",
    "assemble",
    "dn_eigenvalue",
    "element_matrices",
    "fibonacci_sphere",
    "icosphere",
    "mesh_region",
    "rayleigh_quotient",
    "smallest_eigenvalue",
    "triangle_angles",
]
