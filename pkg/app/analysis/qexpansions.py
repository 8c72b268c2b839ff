"""
Modular Form Coefficients
=========================

Exact Fourier coefficients of the classical Eisenstein series, the
discriminant and the weight 18 cusp form Delta * E6 for the full modular
group (the Hecke group with p = 3, lambda = 1). They provide the q = 0
test case of the Mellin machinery: an honest modular form of odd half
weight whose transform satisfies Phi(2k - s) + Phi(s) = 0.

Arithmetic runs on numpy object arrays so the integers never overflow.
"""

from typing import Dict

import numpy as np

from analysis.mellin_remainder import FourierSeries
from utils.errors import DomainError

E4_NORMALISATION = 240
E6_NORMALISATION = -504


def divisor_sums(n_terms: int, power: int) -> np.ndarray:
    """sigma_power(n) for n = 0..n_terms (entry 0 unused)"""
    sigma = np.zeros(n_terms + 1, dtype=object)
    for d in range(1, n_terms + 1):
        sigma[d::d] += d ** power
    return sigma


def eisenstein(weight: int, n_terms: int) -> np.ndarray:
    """q-coefficients 0..n_terms of E4 or E6"""
    if weight == 4:
        scale, power = E4_NORMALISATION, 3
    elif weight == 6:
        scale, power = E6_NORMALISATION, 5
    else:
        raise DomainError(f"only E4 and E6 are tabulated, not weight {weight}")
    coeffs = scale * divisor_sums(n_terms, power)
    coeffs[0] = 1
    return coeffs


def multiply(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Truncated product of two q-series of equal length"""
    return np.convolve(a, b)[: len(a)]


def discriminant(n_terms: int) -> np.ndarray:
    """Delta = (E4^3 - E6^2) / 1728"""
    e4 = eisenstein(4, n_terms)
    e6 = eisenstein(6, n_terms)
    numerator = multiply(multiply(e4, e4), e4) - multiply(e6, e6)
    return numerator // 1728


def delta_e6(n_terms: int) -> np.ndarray:
    """Delta * E6 = (E4^3 E6 - E6^3) / 1728, weight 18"""
    e4 = eisenstein(4, n_terms)
    e6 = eisenstein(6, n_terms)
    e6_sq = multiply(e6, e6)
    numerator = multiply(multiply(multiply(e4, e4), e4), e6) - multiply(e6_sq, e6)
    return numerator // 1728


TABLE = {
    "delta": (discriminant, 12),
    "delta_e6": (delta_e6, 18),
}


def cusp_form_series(name: str, n_terms: int) -> FourierSeries:
    """FourierSeries of a tabulated cusp form on the modular group (lambda = 1)"""
    try:
        builder, weight = TABLE[name]
    except KeyError:
        raise DomainError(f"unknown form {name!r}; choose from {sorted(TABLE)}") from None
    coeffs = builder(n_terms)
    if coeffs[0] != 0:
        raise DomainError(f"{name} is not a cusp form")
    return FourierSeries(1, [int(c) for c in coeffs[1:]], weight)


def coefficient_document(name: str, n_terms: int) -> Dict[str, object]:
    """JSON document in the --coeffs input format"""
    series = cusp_form_series(name, n_terms)
    return {"lambda_p": 3, "weight": series.weight, "coeffs": [int(c) for c in series.coeffs]}
