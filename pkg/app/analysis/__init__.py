"""
Numeric Analysis
================

Rational period functions, special functions, Mellin transforms and the
remainder term of the Hecke functional equation.
"""

from .reports import ResidualReport
from .rpf import RpfSpec, build_spec
from .mellin_remainder import FourierSeries, remainder_expr, rho

__all__ = ['ResidualReport', 'RpfSpec', 'build_spec', 'FourierSeries', 'remainder_expr', 'rho']
