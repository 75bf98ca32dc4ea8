"""Limits of zeros of polynomial sequences with linear and quadratic coefficients."""

__version__ = "0.1.0"
