"""
Tests for Gamma, Beta and the hypergeometric evaluators.
"""

import pytest
from hypothesis import assume, given, settings, strategies as st
from mpmath import mp

from analysis.special_functions import (
    Hyp2F1Request, beta, check_connection_formula, check_euler_transformation,
    check_gamma_reflection, gamma, hyp2f1_continued, hyp2f1_integral, hyp2f1_reference,
    hyp2f1_terminating, minimal_shift,
)
from utils.errors import DomainError, PoleError
from utils.numerics import principal_arg, principal_power, relative_error


def test_branch_convention():
    assert principal_arg(-1) == -mp.pi
    assert complex(principal_power(-1, 0.5)) == pytest.approx(-1j)
    assert complex(principal_power(1j, 1)) == pytest.approx(1j)


def test_gamma_poles_carry_residues():
    with pytest.raises(PoleError) as info:
        gamma(-2)
    assert info.value.location == -2
    assert float(info.value.residue) == pytest.approx(0.5)
    with pytest.raises(PoleError):
        beta(-1, 0.5)
    assert complex(beta(2, 3)) == pytest.approx(1 / 12)


@pytest.mark.parametrize("s", [0.3 + 0.4j, 2.7 - 1.1j, -1.5 + 0.2j])
def test_gamma_reflection(s):
    assert check_gamma_reflection(s) < 1e-12


@pytest.mark.parametrize("k", [1, 2, 3, 5])
def test_terminating_series_matches_library(k):
    for c, z in [(2.5 + 0.3j, 0.3 - 0.2j), (-0.5 + 1j, -2.0), (4.0, 1.7 + 0.5j)]:
        assert relative_error(hyp2f1_terminating(k, c, z), mp.hyp2f1(k, 1 - k, c, z)) < 1e-12


def test_terminating_series_rejects_zero_denominator():
    with pytest.raises(PoleError):
        hyp2f1_terminating(3, 0, 0.5)
    with pytest.raises(DomainError):
        hyp2f1_terminating(0, 1.5, 0.5)


@pytest.mark.parametrize("k", [2, 3, 4])
def test_terminating_against_integral_on_overlap(k):
    # Euler integral needs Re c > Re b > 0, so swap the upper parameters
    c, z = 5.5 + 0.2j, 0.4 + 0.3j
    assert relative_error(hyp2f1_terminating(k, c, z), hyp2f1_integral(1 - k, k, c, z)) < 1e-10


def test_integral_matches_reference():
    assert relative_error(hyp2f1_integral(1.5, 0.7, 2.3, 0.4 + 0.3j),
                          hyp2f1_reference(1.5, 0.7, 2.3, 0.4 + 0.3j)) < 1e-9
    with pytest.raises(DomainError):
        hyp2f1_integral(1, 2, 1.5, 0.5)
    with pytest.raises(DomainError):
        hyp2f1_integral(1, 0.5, 1.5, 2.0)


@settings(max_examples=50)
@given(
    a=st.floats(-1.5, 2), b=st.floats(0.2, 1.5), extra=st.floats(0.3, 2),
    x=st.floats(-0.6, 0.6), y=st.floats(-0.6, 0.6),
)
def test_euler_transformation(a, b, extra, x, y):
    c = b + extra
    assert check_euler_transformation(a, b, c, complex(x, y)) < 1e-8


@settings(max_examples=50)
@given(
    a=st.floats(0.3, 1.2), b=st.floats(1.6, 2.5), c=st.floats(2.8, 4.0),
    x=st.floats(-6, 6), y=st.floats(0.5, 4),
)
def test_connection_formula(a, b, c, x, y):
    assume(abs((b - a) - round(b - a)) > 0.05)
    z = complex(x, y)
    if abs(z) <= 1.5:
        z = z * 2 / abs(z)
    assert check_connection_formula(a, b, c, z) < 1e-8


def test_connection_formula_domain():
    with pytest.raises(DomainError):
        check_connection_formula(0.5, 1.5, 3, 0.5j)


def test_continued_integral_in_convergent_region():
    w = mp.mpf(1.5)
    value = hyp2f1_continued(1, w + 1, -0.8j, k=1)
    assert relative_error(value, mp.hyp2f1(1, w, w + 1, -0.8j) / w) < 1e-9


@pytest.mark.parametrize("m, s", [(1, 0.3), (1, -1.6 + 0.5j), (2, 1.2 + 2j), (3, 0.45)])
def test_continuation_by_parts(m, s):
    k = 3
    w = mp.mpc(s) - 2 * k + m
    value = hyp2f1_continued(m, s, -1.3j, k=k)
    assert relative_error(value, mp.hyp2f1(m, w, w + 1, -1.3j) / w) < 1e-9
    more = hyp2f1_continued(m, s, -1.3j, n=minimal_shift(w) + 2, k=k)
    assert relative_error(value, more) < 1e-9


def test_continuation_poles():
    with pytest.raises(PoleError) as info:
        hyp2f1_continued(1, 1, -1j, k=1)
    assert info.value.location == 1
    with pytest.raises(PoleError):
        hyp2f1_continued(2, -1, -1j, k=1)
    with pytest.raises(DomainError):
        hyp2f1_continued(1, 0.5 - 3, -1j, n=0, k=1)


def test_request_modes():
    terminating = Hyp2F1Request(3, -2, 2.5, 0.3, mode="terminating").evaluate()
    assert relative_error(terminating, mp.hyp2f1(3, -2, 2.5, 0.3)) < 1e-12
    integral = Hyp2F1Request(1.5, 0.7, 2.3, 0.4).evaluate()
    assert relative_error(integral, mp.hyp2f1(1.5, 0.7, 2.3, 0.4)) < 1e-9
    w = mp.mpc(0.5, 0.3)
    continued = Hyp2F1Request(2, w, w + 1, -1.3j, mode="continued").evaluate()
    assert relative_error(continued, mp.hyp2f1(2, w, w + 1, -1.3j)) < 1e-9
    with pytest.raises(DomainError):
        Hyp2F1Request(1, 2, 3, 0.1, mode="bogus").evaluate()


@pytest.mark.parametrize("a", [1.5, 0, -2, 2 + 0.5j])
def test_continued_mode_needs_positive_integer_a(a):
    with pytest.raises(DomainError, match="positive integer"):
        Hyp2F1Request(a, 0.7, 1.7, -1j, mode="continued").evaluate()


@pytest.mark.parametrize("m, s, bt", [(1, 0.3, -1.3j), (1, -1.6 + 0.5j, -1.3j), (3, 0.45, -1.3j),
                                      (2, 0.7 + 1j, 0.9 - 3j)])
def test_continuation_near_the_endpoint_singularity(m, s, bt):
    # Re(w + n) in (0, 1): y^(w+n-1) is singular at the origin
    k = 3
    w = mp.mpc(s) - 2 * k + m
    n = minimal_shift(w)
    assert 0 < (w + n).real < 1
    value = hyp2f1_continued(m, s, bt, n=n, k=k)
    assert relative_error(value, mp.hyp2f1(m, w, w + 1, bt) / w) < 1e-10


def test_accuracy_follows_working_precision():
    with mp.workprec(128):
        bt = mp.mpc(0, -1.3)
        w = mp.mpc(0.45) - 3
        value = hyp2f1_continued(3, 0.45, bt, k=3)
        assert relative_error(value, mp.hyp2f1(3, w, w + 1, bt) / w) < 1e-28
        a, b, c, z = mp.mpf(1.5), mp.mpf(0.75), mp.mpf(2.25), mp.mpc(0.5, 0.25)
        assert relative_error(hyp2f1_integral(a, b, c, z), mp.hyp2f1(a, b, c, z)) < 1e-28
