"""Lattice-theoretic toolkit for multimode GKP codes."""

__version__ = "0.1.0"
