"""Exact de Rham cohomology of connections on punctured projective lines over Q."""

__version__ = "0.1.0"
