"""
Numeric Helpers
=====================

Branch-cut conventions, precision contexts, seeded sample grids and error
measures shared by the evaluators and the checks.

Complex powers follow the convention -pi <= arg z < pi throughout: the
negative real axis belongs to the lower half-plane, so arg(-1) = -pi.
"""

import contextlib
from typing import Iterator, List, Union

import mpmath
import numpy as np
from mpmath import mp, iv

Number = Union[int, float, complex, mpmath.mpf, mpmath.mpc]


def principal_arg(z: Number) -> mpmath.mpf:
    """Argument of z in [-pi, pi)"""
    z = mp.mpc(z)
    if z.imag == 0 and z.real < 0:
        return -mp.pi
    return mp.arg(z)


def principal_log(z: Number) -> mpmath.mpc:
    """
    Logarithm with -pi <= Im log z < pi

    Args:
        z: Nonzero complex number

    Returns:
        log|z| + i arg z
    """
    z = mp.mpc(z)
    if z == 0:
        raise ZeroDivisionError("log of zero")
    return mp.mpc(mp.log(abs(z)), principal_arg(z))


def principal_power(z: Number, a: Number) -> mpmath.mpc:
    """z**a on the principal branch -pi <= arg z < pi"""
    z = mp.mpc(z)
    a = mp.mpc(a)
    if z == 0:
        if a.real > 0:
            return mp.mpc(0)
        raise ZeroDivisionError("0 raised to a power with non-positive real part")
    return mp.exp(a * principal_log(z))


@contextlib.contextmanager
def interval_precision(bits: int) -> Iterator[None]:
    """Temporarily set the working precision of ``mpmath.iv``"""
    saved = iv.prec
    iv.prec = bits
    try:
        yield
    finally:
        iv.prec = saved


def working_bits(k: int, precision_bits: int, extended_bits: int, extended_from_k: int) -> int:
    """Precision used for weight-2k evaluations; large k gets the extended mode."""
    if k >= extended_from_k:
        return max(precision_bits, extended_bits)
    return precision_bits


def precision_tolerance(margin_bits: int = 20) -> float:
    """Accuracy target for quadratures at the current working precision: 2^-(prec - margin_bits)"""
    return float(mp.ldexp(1, margin_bits - mp.prec))


def relative_error(value: Number, reference: Number) -> float:
    """|value - reference| / |reference|, falling back to absolute error near zero"""
    value = mp.mpc(value)
    reference = mp.mpc(reference)
    scale = abs(reference)
    diff = abs(value - reference)
    if scale < mp.mpf('1e-300'):
        return float(diff)
    return float(diff / scale)


def sample_upper_half_plane(n: int, seed: int, x_max: float = 5.0,
                            y_min: float = 0.2, y_max: float = 5.0) -> List[complex]:
    """
    Seeded uniform samples z = x + iy with |x| <= x_max and y_min <= y <= y_max

    Args:
        n: Number of samples
        seed: RNG seed
        x_max: Bound on |Re z|
        y_min: Lower bound on Im z
        y_max: Upper bound on Im z

    Returns:
        List of complex sample points
    """
    rng = np.random.default_rng(seed)
    xs = rng.uniform(-x_max, x_max, size=n)
    ys = rng.uniform(y_min, y_max, size=n)
    return [complex(x, y) for x, y in zip(xs, ys)]


def strip_grid(k: int, n: int, seed: int, exclusion: float = 0.05,
               im_max: float = 3.0) -> List[complex]:
    """
    Seeded points in the strip 0 < Re s < 2k staying ``exclusion`` away from
    every integer (the Beta poles of the closed forms sit there).

    Returns:
        Points sorted by (Re s, Im s)
    """
    rng = np.random.default_rng(seed)
    points: List[complex] = []
    while len(points) < n:
        re = rng.uniform(exclusion, 2 * k - exclusion)
        im = rng.uniform(-im_max, im_max)
        s = complex(re, im)
        if abs(s - round(re)) < exclusion:
            continue
        points.append(s)
    return sorted(points, key=lambda s: (s.real, s.imag))


def regular_strip_grid(k: int, rows: int, cols: int, exclusion: float = 0.05) -> List[complex]:
    """rows x cols lattice of points in 0 < Re s < 2k, shifted off the integers"""
    res = np.linspace(0.0, 2.0 * k, cols + 2)[1:-1]
    res = [r + exclusion * 2 if abs(r - round(r)) < exclusion else r for r in res]
    ims = np.linspace(-2.0, 2.0, rows)
    return [complex(r, t) for t in ims for r in res]


def interval_mid(x: iv.mpf) -> mpmath.mpf:
    """Midpoint of a real mpmath interval as a plain ``mp.mpf``"""
    return mp.make_mpf(x.mid._mpi_[0])
