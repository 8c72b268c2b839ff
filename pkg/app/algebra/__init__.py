"""
Exact Algebra
=============

Arithmetic in Z[lambda_p], the Hecke group G_p, indefinite quadratic forms
and the simple cycles of Hecke symmetric classes. Everything here is exact;
floating point only appears in certified interval embeddings.
"""

from .lambda_ring import RingElem, minimal_polynomial
from .hecke_group import GroupElem, generators, interval_decomposition
from .quadratic_forms import HyperbolicPoint, QuadraticForm, SimpleCycle, enumerate_simple_cycle

__all__ = [
    'RingElem',
    'minimal_polynomial',
    'GroupElem',
    'generators',
    'interval_decomposition',
    'QuadraticForm',
    'HyperbolicPoint',
    'SimpleCycle',
    'enumerate_simple_cycle',
]
