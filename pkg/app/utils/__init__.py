"""
Utility Package
===============

Logging, profiling, numeric helpers and the exception hierarchy shared by
the algebra and analysis layers.
"""

from .errors import (
    AccuracyError, DomainError, HeckeRpfError, IncompleteEnumerationError,
    InputError, PoleError, PoleProximityError, SymmetryError,
)
from .logger import get_logger, setup_logging
from .performance import PerformanceProfiler, profile_operation

__all__ = [
    'setup_logging',
    'get_logger',
    'PerformanceProfiler',
    'profile_operation',
    'HeckeRpfError',
    'DomainError',
    'PoleError',
    'PoleProximityError',
    'AccuracyError',
    'SymmetryError',
    'IncompleteEnumerationError',
    'InputError',
]
