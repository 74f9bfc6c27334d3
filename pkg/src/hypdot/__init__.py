"""Spectrum of a harmonic quantum dot with a point impurity on the Lobachevsky plane."""

from ._core import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
