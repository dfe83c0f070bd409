"""Exact verification toolkit for orbit closures in module varieties."""

from .exactfield import GF, QQ, FieldSpec, Matrix

__version__ = "0.1.0"

__all__ = ["FieldSpec", "Matrix", "QQ", "GF", "__version__"]
