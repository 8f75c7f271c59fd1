"""Superintegrable systems from pairs of one-dimensional algebraic Hamiltonians."""

__version__ = "0.1.0"
