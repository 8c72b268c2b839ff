"""
Exception Hierarchy
===================

Exceptions raised by the exact algebra layer, the numeric evaluators and the
command-line driver. Every exception derives from ``HeckeRpfError`` so callers
can catch the whole family at once.
"""

from typing import Any, Optional


class HeckeRpfError(Exception):
    """Base exception for the package.

    Args:
        message: The error message
    """

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class DomainError(HeckeRpfError):
    """Raised when an argument lies outside the domain of an operation
    (p < 3, mismatched group index, non-hyperbolic input, ...)."""


class PoleError(HeckeRpfError):
    """Raised when a function is evaluated exactly at one of its poles.

    Args:
        message: The error message
        location: Where the pole sits
        residue: Residue at the pole, when it is known in closed form
    """

    def __init__(self, message: str, location: Any = None, residue: Any = None):
        super().__init__(message)
        self.location = location
        self.residue = residue


class PoleProximityError(PoleError):
    """Raised when an evaluation point is within the guard distance of a pole."""


class AccuracyError(HeckeRpfError):
    """Raised when a quadrature or a series tail cannot meet the requested tolerance.

    Args:
        message: The error message
        estimate: The error estimate that failed the test
    """

    def __init__(self, message: str, estimate: Optional[float] = None):
        super().__init__(message)
        self.estimate = estimate


class SymmetryError(HeckeRpfError):
    """Raised when a quadratic form class is not Hecke symmetric (-A != A)."""


class IncompleteEnumerationError(HeckeRpfError):
    """Raised when the closure certificate of a simple cycle fails at the
    requested search depth.

    Args:
        message: The error message
        max_depth: Depth that was searched
    """

    def __init__(self, message: str, max_depth: Optional[int] = None):
        super().__init__(message)
        self.max_depth = max_depth


class InputError(HeckeRpfError):
    """Raised for malformed JSON documents or inconsistent command-line flags."""
