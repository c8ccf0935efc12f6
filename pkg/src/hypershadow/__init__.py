"""Light through a hypercube of balls: shadows, random lines and their limit laws."""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import ConvergenceError, DomainError

__all__ = ["ConvergenceError", "DomainError", "__version__"]
