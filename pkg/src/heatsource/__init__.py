"""Recover the spatial factor f(x, y) of a separable heat source phi(t) f(x, y)
on the unit square from initial and final temperatures."""

__version__ = "0.1.0"
