"""
Tests for rational period function specs and their two relations.
"""

import json

import numpy as np
import pytest
from mpmath import mp

from algebra.quadratic_forms import QuadraticForm
from analysis.rpf import (
    RpfSpec, build_spec, growth_profile, partial_fractions, q0_eval, q_eval, qstar_eval,
    qstar_interval_form, slash, verify_odd_symmetry, verify_relation1, verify_relation2,
)
from algebra.hecke_group import generators, word
from utils.errors import DomainError, PoleError, PoleProximityError
from utils.numerics import relative_error, sample_upper_half_plane

GOLDEN = 0.6180339887498949

RELATION_SPECS = [
    ("golden_p3_k1.json", 1e-8),
    ("golden_p3_k3.json", 1e-6),
    ("symmetric_p5_k1.json", 1e-8),
    ("symmetric_p5_k3.json", 1e-6),
    ("symmetric_p7_k1.json", 1e-8),
    ("two_classes_p3_k1.json", 1e-8),
]


@pytest.fixture
def golden(load_spec_file):
    return load_spec_file("golden_p3_k1.json")


@pytest.mark.parametrize("name, tolerance", RELATION_SPECS)
def test_period_relations(load_spec_file, name, tolerance):
    spec = load_spec_file(name)
    samples = sample_upper_half_plane(100, seed=0)
    first = verify_relation1(spec, samples, tolerance)
    second = verify_relation2(spec, samples, tolerance)
    assert first.n_samples == 100
    assert first.passed, first.max_residual
    assert second.passed, second.max_residual


def test_relations_at_extended_precision(load_spec_file):
    spec = load_spec_file("golden_p3_k3.json", precision_bits=128)
    samples = sample_upper_half_plane(20, seed=3)
    assert verify_relation1(spec, samples, 1e-10).passed
    assert verify_relation2(spec, samples, 1e-10).passed


def test_broken_spec_fails_second_relation(golden):
    # Dropping a pole pair destroys the period relations
    broken = RpfSpec(p=golden.p, k=golden.k, terms=golden.terms, c0=0.0, bits=golden.bits)
    broken.terms[0].cycle.members = broken.terms[0].cycle.members[:1]
    report = verify_relation2(broken, sample_upper_half_plane(10, seed=0), 1e-8)
    assert not report.passed


def test_odd_symmetry_and_growth(golden):
    samples = sample_upper_half_plane(10, seed=1)
    assert verify_odd_symmetry(golden, samples, 1e-10).passed
    growth = growth_profile(golden)
    assert growth["qstar_decay_ok"]
    assert growth["q0_bounded_ok"]


def test_single_golden_cycle_value():
    seed = QuadraticForm.from_ints([1, 1, -1], 3)
    spec = build_spec(3, 1, [seed], [1.0])
    # 1/(z^2 + z - 1) + 1/(z^2 - z - 1) at z = 2i
    assert complex(qstar_eval(2j, spec)) == pytest.approx(-10 / 29)


def test_q_decomposition(golden):
    z = mp.mpc(0.3, 1.1)
    expected = qstar_eval(z, golden) + golden.c0 * q0_eval(z, golden)
    assert relative_error(q_eval(z, golden), expected) < 1e-15
    # q0 = nu (1 - z^-2) + eta / z
    assert complex(q0_eval(1j, golden)) == pytest.approx(0.5 * 2 - 0.25j)


def test_poles_are_guarded(golden):
    with pytest.raises(PoleError):
        q0_eval(0, golden)
    with pytest.raises(PoleProximityError):
        qstar_eval(mp.mpf(GOLDEN) + 1e-9, golden)


def test_slash_weight_must_be_even():
    _, T, _ = generators(3)
    with pytest.raises(DomainError):
        slash(lambda z: z, T, 3)


@pytest.mark.parametrize("p, first, second", [(3, "S", "T"), (5, "ST", "sTT"), (5, "U", "SSTs"), (7, "TS", "u")])
@pytest.mark.parametrize("weight", [2, 6])
def test_slash_composes(p, first, second, weight):
    M1, M2 = word(first, p), word(second, p)
    f = lambda z: 1 / (z - 0.3) ** 3 + z ** 2
    twice = slash(slash(f, M1, weight), M2, weight)
    once = slash(f, M1.compose(M2), weight)
    for z in (mp.mpc(0.2, 0.9), mp.mpc(-1.4, 0.3), mp.mpc(2.5, 1.7)):
        assert relative_error(twice(z), once(z)) < 1e-11


@pytest.mark.parametrize("name", ["golden_p3_k1.json", "golden_p3_k3.json", "symmetric_p5_k3.json"])
def test_q0_alone_satisfies_first_relation(load_spec_file, name):
    spec = load_spec_file(name)
    _, T, _ = generators(spec.p)
    f = lambda z: q0_eval(z, spec)
    fT = slash(f, T, spec.weight)
    for z in sample_upper_half_plane(20, seed=4):
        assert abs(fT(z) + f(z)) < 1e-11 * max(1.0, float(abs(f(z))))


def test_interval_form_matches_direct_sum(load_spec_file):
    for name in ("golden_p3_k1.json", "symmetric_p5_k1.json", "two_classes_p3_k1.json"):
        spec = load_spec_file(name)
        form = qstar_interval_form(spec)
        for z in (mp.mpc(0.2, 0.9), mp.mpc(-1.7, 0.4)):
            assert relative_error(form.evaluate(z), qstar_eval(z, spec)) < 1e-12


@pytest.mark.parametrize("k", [1, 2, 3, 5])
def test_partial_fractions_recombine(k):
    pf = partial_fractions(k, GOLDEN, -1 - GOLDEN)
    assert set(pf.a) == set(range(1, k + 1))
    assert pf.a[k] == 1
    for z in (0.3 + 0.7j, -2.5 + 0.1j):
        assert pf.recombination_error(z) < 1e-12 * max(1.0, float(abs(pf.original(z))))


def test_partial_fractions_against_linear_solve():
    # delta^k = sum_m a_m (z-alpha)^(k-m) (z-alpha')^k + sum_n b_n (z-alpha')^(k-n) (z-alpha)^k
    k, alpha, alpha_c = 3, GOLDEN, -1 - GOLDEN
    zs = np.linspace(-2.5, 2.5, 2 * k) + 0.1
    system = np.array([
        [(z - alpha) ** (k - m) * (z - alpha_c) ** k for m in range(1, k + 1)]
        + [(z - alpha_c) ** (k - n) * (z - alpha) ** k for n in range(1, k + 1)]
        for z in zs
    ])
    solved = np.linalg.solve(system, np.full(2 * k, (alpha - alpha_c) ** k))
    pf = partial_fractions(k, alpha, alpha_c)
    expected = [float(pf.a[m]) for m in range(1, k + 1)] + [float(pf.b[n]) for n in range(1, k + 1)]
    assert list(solved) == pytest.approx(expected, rel=1e-8, abs=1e-10)


def test_partial_fractions_need_distinct_points():
    with pytest.raises(DomainError):
        partial_fractions(3, 1.0, 1.0)


def test_spec_validation(golden):
    seed = QuadraticForm.from_ints([1, 1, -1], 3)
    with pytest.raises(DomainError):
        build_spec(3, 2, [seed], [1.0])
    with pytest.raises(DomainError):
        build_spec(3, 3, [seed], [1.0], eta=0.5)
    with pytest.raises(DomainError):
        build_spec(3, 1, [seed], [1.0, 2.0])
    with pytest.raises(DomainError):
        build_spec(5, 1, [seed], [1.0])
    with pytest.raises(DomainError):
        RpfSpec.from_json({"k": 1, "terms": []})


def test_spec_json_round_trip(golden, specs_dir):
    document = json.loads((specs_dir / "golden_p3_k1.json").read_text())
    dumped = golden.to_json()
    assert dumped["p"] == 3 and dumped["k"] == 1
    assert dumped["terms"][0]["seed_form"] == {"p": 3, "A": [1], "B": [1], "C": [-1]}
    again = RpfSpec.from_json(dumped)
    assert again.to_json() == dumped
    assert document["c0"] == dumped["c0"]
