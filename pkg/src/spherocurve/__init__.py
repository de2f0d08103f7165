"""Locally convex curves on the 2- and 3-sphere: frames, spin lifts,
curve decomposition and convexity certification."""

from . import catalog, convexity, curves, decomp, errors, frenet, quatspin, sphere2

__all__ = [
    "catalog",
    "convexity",
    "curves",
    "decomp",
    "errors",
    "frenet",
    "quatspin",
    "sphere2",
]

__version__ = "0.1.0"
