"""Faber polynomials of exterior conformal maps with corners: generation, asymptotics and zeros."""

__version__ = "0.1.0"
