"""Riemann zeta moment constants, interval-maximum predictions and Monte Carlo checks."""

__version__ = "0.1.0"
