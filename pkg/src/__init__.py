"""Doubled-coordinate quantum Brownian motion toolkit."""

__version__ = "1.0.0"
