"""
Tests for the remainder term R(s), its atoms, the rho operator and the
pieces of the Mellin transform.
"""

import pytest
from mpmath import mp

from analysis.mellin_remainder import (
    FourierSeries, E0_eval, E0_quadrature, Estar_alt, Estar_eval, R_closed, R_quadrature,
    RemainderExpr, atom_closed, atom_quadrature, first_relation_check, functional_equation_check,
    inverse_mellin_check, reflection_residual, phi_partial, remainder_expr, rho, scan_estar_poles,
    verify_second_relation,
)
from utils.errors import DomainError, PoleError
from utils.numerics import regular_strip_grid, relative_error, strip_grid

SIGN_CONFIGURATIONS = [(-0.5, 1.5), (1.5, -0.5), (2.0, 0.5), (-2.0, -0.5)]


@pytest.fixture
def golden(load_spec_file):
    return load_spec_file("golden_p3_k1.json")


# Atoms

def test_anchor_value():
    assert abs(atom_closed(1, 1, -1, 1) + mp.pi) < 1e-10
    assert abs(atom_quadrature(1, 1, -1, 1) + mp.pi) < 1e-10


def test_integer_points_without_limit():
    with pytest.raises(PoleError) as info:
        atom_closed(1, 1, -1, 1, allow_limit=False)
    assert info.value.location == 1
    # Away from the integers both paths agree
    assert atom_closed(0.6 + 0.2j, 1, -1, 1, allow_limit=False) == atom_closed(0.6 + 0.2j, 1, -1, 1)


@pytest.mark.parametrize("k", [1, 3])
def test_closed_form_against_quadrature(k):
    for s in regular_strip_grid(k, 3, 3):
        for a, b in SIGN_CONFIGURATIONS:
            assert relative_error(atom_closed(s, a, b, k), atom_quadrature(s, a, b, k)) < 1e-6


def test_closed_form_near_an_integer():
    s = mp.mpc(2.01, 0.02)
    assert relative_error(atom_closed(s, 2.0, -0.5, 3), atom_quadrature(s, 2.0, -0.5, 3)) < 1e-8


def test_atom_swap_sign():
    s = mp.mpc(1.3, 0.4)
    for k in (1, 3):
        assert relative_error(atom_closed(s, -0.5, 1.5, k), (-1) ** k * atom_closed(s, 1.5, -0.5, k)) < 1e-12


def test_atom_domain():
    with pytest.raises(DomainError):
        atom_closed(2.5, 1, -1, 1)
    with pytest.raises(DomainError):
        atom_closed(0.5, 0, 1, 1)
    with pytest.raises(DomainError):
        atom_quadrature(0.5, 1, 1, 1)


@pytest.mark.parametrize("p", [3, 5])
@pytest.mark.parametrize("k", [1, 3])
def test_reflection_under_u_inverse(p, k):
    for s in (mp.mpc(0.7, 0.3), mp.mpc(k + 0.45, -1.2)):
        assert reflection_residual(s, 2.5, -0.7, k, p) < 1e-8


# The remainder term

def test_remainder_closed_against_quadrature(golden):
    for s in strip_grid(1, 5, seed=0):
        assert relative_error(R_closed(s, golden), R_quadrature(s, golden)) < 1e-7


def test_first_relation(golden):
    report = first_relation_check(golden, strip_grid(1, 10, seed=0), 1e-8)
    assert report.n_samples == 10
    assert report.passed, report.details
    assert report.details["closed_vs_quadrature_max_rel"] < 1e-7


def test_symbolic_expression_matches_closed_form(golden):
    expr = remainder_expr(golden)
    s = mp.mpc(0.6, 0.5)
    assert relative_error(expr.evaluate(s), R_closed(s, golden)) < 1e-9
    assert relative_error(expr.merged().evaluate(s), R_closed(s, golden)) < 1e-9


def test_golden_merge_counts(golden):
    expr = remainder_expr(golden)
    assert len(expr.atoms) == 4
    merged = expr.merged()
    assert len(merged.atoms) == 2
    assert not merged.is_empty()


@pytest.mark.parametrize("name", ["golden_p3_k1.json", "symmetric_p5_k1.json", "symmetric_p5_k3.json",
                                  "symmetric_p7_k1.json", "two_classes_p3_k1.json"])
def test_second_relation(load_spec_file, name):
    spec = load_spec_file(name)
    report = verify_second_relation(spec, strip_grid(spec.k, 10, seed=0), 1e-8)
    assert report.details["symbolic_cancellation"]
    assert report.details["atoms_after_cancellation"] == 0
    assert report.details["rho_order_p"]
    assert len(report.details["trace"]) == spec.p
    assert report.passed, report.max_residual


def test_rho_has_order_p(load_spec_file):
    spec = load_spec_file("symmetric_p5_k1.json")
    start = remainder_expr(spec).merged()
    image = start
    for _ in range(spec.p):
        image = rho(image)
    assert image.same_as(start)
    assert not rho(start).same_as(start)


def test_expressions_of_different_groups_do_not_add(load_spec_file):
    golden = remainder_expr(load_spec_file("golden_p3_k1.json"))
    other = remainder_expr(load_spec_file("symmetric_p5_k1.json"))
    with pytest.raises(DomainError):
        golden + other
    assert isinstance(golden + golden, RemainderExpr)


# E0 and E*

def test_e0_closed_form(golden):
    # -nu (1/(s-2) + 1/s) + i eta / (s-1) at s = 3
    value = E0_eval(3, golden)
    assert complex(value) == pytest.approx(-2 / 3 + 0.125j)
    assert relative_error(E0_quadrature(3, golden), value) < 1e-10


def test_e0_poles(golden, load_spec_file):
    with pytest.raises(PoleError) as info:
        E0_eval(0, golden)
    assert float(info.value.residue) == pytest.approx(-0.5)
    with pytest.raises(PoleError):
        E0_eval(2, golden)
    with pytest.raises(PoleError) as info:
        E0_eval(1, golden)
    assert complex(info.value.residue) == pytest.approx(0.25j)
    assert E0_eval(0, load_spec_file("symmetric_p5_k1.json")) == 0
    with pytest.raises(DomainError):
        E0_quadrature(1.5, golden)


def test_estar_methods_agree(golden):
    for s in (mp.mpc(1.3, 0.5), mp.mpc(2.6, -1.0)):
        hyper = Estar_eval(s, golden, "hypergeometric")
        assert relative_error(hyper, Estar_eval(s, golden, "quadrature")) < 1e-8
    s = mp.mpc(0.4, 0.7)
    assert relative_error(Estar_eval(s, golden), Estar_alt(s, golden)) < 1e-8
    with pytest.raises(DomainError):
        Estar_eval(s, golden, "bogus")


def test_estar_continues_left_of_the_strip(golden):
    s = mp.mpc(-0.5, 0.3)
    value = Estar_eval(s, golden)
    assert mp.isfinite(value.real) and mp.isfinite(value.imag)


def test_estar_pole_scan(golden):
    poles = scan_estar_poles(golden, -2, 3)
    assert all(n <= golden.weight - 1 for n in poles)


# Functional equation

def test_functional_equation_with_remainder(golden):
    report = functional_equation_check(None, golden, strip_grid(1, 6, seed=2), 1e-8)
    assert report.passed, report.max_residual


def test_functional_equation_weight_mismatch(golden):
    series = FourierSeries(1, [1.0, 2.0], 18)
    with pytest.raises(DomainError):
        functional_equation_check(series, golden, [1 + 0.5j])


def test_phi_partial_single_coefficient():
    series = FourierSeries(1, [1], 2)
    value = phi_partial(2, series).value
    assert complex(value) == pytest.approx(1 / (4 * float(mp.pi) ** 2))


def test_fourier_series_documents():
    with pytest.raises(DomainError):
        FourierSeries.from_json({"lambda_p": 3, "weight": 18, "coeffs": [1], "a0": 1})
    with pytest.raises(DomainError):
        FourierSeries.from_json({"weight": 18, "coeffs": [1]})
    with pytest.raises(DomainError):
        FourierSeries(1, [1], 3)
    series = FourierSeries.from_json({"lambda_p": 5, "weight": 2, "coeffs": [1, 0, -1]})
    assert float(series.lambda_scale) == pytest.approx(1.6180339887498949)
    assert series.to_json(5)["coeffs"] == [1.0, 0.0, -1.0]


def test_fourier_series_tail_estimate():
    series = FourierSeries(1, [1, -24, 252, -1472, 4830], 12)
    value, tail = series.evaluate(2j)
    assert tail < 1e-20
    with pytest.raises(DomainError):
        series.evaluate(0.5)


# Inverse Mellin transform

def test_inverse_mellin_spot_check():
    result = inverse_mellin_check(1, -1, 1, 1, 1, 60)
    assert result["exact"] == pytest.approx(-1)
    assert result["error"] < 1e-4
    longer = inverse_mellin_check(1, -1, 1, 1, 1, 120)
    assert longer["error"] <= 1.5 * result["error"] + 1e-12
    with pytest.raises(DomainError):
        inverse_mellin_check(1, -1, 1, 1, 2.5, 60)
