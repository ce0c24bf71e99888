"""Argument of Dirichlet L-functions, mollifier constants and numerical experiments."""

__version__ = "0.1.0"
