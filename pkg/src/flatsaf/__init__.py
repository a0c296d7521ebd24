"""Exact computations for special pseudo-Anosov maps on triangle-group lattice surfaces."""

__version__ = "0.1.0"
