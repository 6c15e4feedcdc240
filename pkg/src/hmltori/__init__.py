"""Hamiltonian-minimal Lagrangian tori in CP^2 from algebro-geometric spectral data."""

from . import numerics, theta

__all__ = ["numerics", "theta"]
__version__ = "0.1.0"
