"""Bandlimited EPDiff geodesics on the flat torus"""

__version__ = "0.1.0"

__all__ = ["__version__"]
