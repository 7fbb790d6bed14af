"""Numerical laboratory for equivariant polyhedral surfaces in AdS^3 and Minkowski space."""

__version__ = "0.1.0"
