"""Curvature, Jacobi operators, linear Jacobi relations and generalized
vector cross products on naturally reductive homogeneous spaces."""

__version__ = "0.1.0"

from . import algebra, catalog, jacobi, liealg, reductive, vcp  # noqa: F401
