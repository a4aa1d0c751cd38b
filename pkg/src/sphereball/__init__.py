"""Polynomial approximation on the unit sphere and the unit ball."""

__version__ = "0.1.0"
