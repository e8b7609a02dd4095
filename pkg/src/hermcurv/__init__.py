"""Pointwise curvature of Hermitian metrics along the Gauduchon line."""

__version__ = "0.1.0"
