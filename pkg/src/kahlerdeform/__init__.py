"""Numerical verification toolkit for closed-conformal deformations of Kähler metrics."""

__version__ = "0.1.0"
