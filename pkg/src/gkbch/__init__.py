"""Spectral solver and numerical experiments for the generalized kb-Camassa-Holm family."""

__version__ = "0.1.0"
