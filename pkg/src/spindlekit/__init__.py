"""Isoperimetric and Faber-Krahn checks on constant-curvature spindles."""

__version__ = "0.1.0"
