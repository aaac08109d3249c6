"""Exhaustive solubilizer computations in small simple groups."""

__version__ = "0.1.0"
