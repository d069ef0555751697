"""Numerical experiments on generalized moment integrals of the Riemann zeta function."""

__version__ = "0.1.0"
