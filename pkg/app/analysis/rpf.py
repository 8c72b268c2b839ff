"""
Hecke Symmetric Rational Period Functions
=========================================

An RPF of weight 2k (k odd) with Hecke symmetric poles splits as

    q(z) = q*(z) + c0 q0(z),
    q*(z) = sum_l d_l sum_{alpha in Z_l} Q_alpha(z)^(-k),
    q0(z) = nu (1 - z^(-2k))            (+ eta / z when 2k = 2),

where Q_alpha is the form of the simple number alpha, so that
D^(k/2) / Q_alpha(z)^k = (alpha - alpha')^k / ((z - alpha)^k (z - alpha')^k).

This module builds such specs from class seeds, evaluates them, and checks
the two relations q|T + q = 0 and q + q|U + ... + q|U^(p-1) = 0 (U = ST).
"""

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import mpmath
from mpmath import mp

from algebra.hecke_group import GroupElem, generators
from algebra.quadratic_forms import (
    HyperbolicPoint, QuadraticForm, SimpleCycle, enumerate_simple_cycle,
)
from analysis.reports import ResidualReport
from config.config_manager import get_config
from utils.errors import DomainError, PoleError, PoleProximityError, SymmetryError
from utils.logger import get_logger
from utils.numerics import working_bits

logger = get_logger("rpf")

ComplexFn = Callable[[Any], mpmath.mpc]


@dataclass
class RpfTerm:
    """One Hecke symmetric class with its coefficient d_l"""
    cycle: SimpleCycle
    d: float

    @property
    def seed(self) -> QuadraticForm:
        return self.cycle.class_seed


@dataclass
class RpfSpec:
    """
    Data of q = q* + c0 q0

    Attributes:
        p: Group index
        k: Odd positive integer, the weight is 2k
        terms: Symmetric classes with coefficients d_l
        c0, nu, eta: Constants of the part with a pole at zero; eta only for 2k = 2
        bits: Working precision of the numeric evaluators
    """
    p: int
    k: int
    terms: List[RpfTerm] = field(default_factory=list)
    c0: float = 0.0
    nu: float = 0.0
    eta: float = 0.0
    bits: int = 64
    _cache: Dict[int, List[Tuple[mpmath.mpf, List[Tuple[mpmath.mpf, mpmath.mpf, mpmath.mpf]], List[mpmath.mpf]]]] = field(
        default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.k < 1 or self.k % 2 == 0:
            raise DomainError(f"weight 2k needs k odd and positive, got k={self.k}")
        if self.k != 1 and self.eta != 0:
            raise DomainError("eta must vanish unless the weight is 2")
        for term in self.terms:
            if term.cycle.p != self.p:
                raise DomainError(f"cycle for p={term.cycle.p} in a spec for p={self.p}")

    @property
    def weight(self) -> int:
        return 2 * self.k

    def numeric_terms(self):
        """Per term: (d, [(A, B, C)], [poles]) at the spec's working precision"""
        if self.bits not in self._cache:
            with mp.workprec(self.bits):
                entries = []
                for term in self.terms:
                    forms, poles = [], []
                    for alpha in term.cycle.members:
                        Q = alpha.form
                        forms.append(tuple(e.to_mpf(self.bits) for e in (Q.A, Q.B, Q.C)))
                        poles.append(alpha.to_mpf(self.bits))
                        poles.append(alpha.hecke_conjugate().to_mpf(self.bits))
                    entries.append((mp.mpf(term.d), forms, poles))
                self._cache[self.bits] = entries
        return self._cache[self.bits]

    def poles(self) -> List[mpmath.mpf]:
        return [pole for _, _, poles in self.numeric_terms() for pole in poles]

    def to_json(self) -> Dict[str, Any]:
        return {
            "p": self.p,
            "k": self.k,
            "c0": self.c0,
            "nu": self.nu,
            "eta": self.eta,
            "terms": [{"seed_form": t.seed.to_json(), "d": t.d} for t in self.terms],
        }

    @classmethod
    def from_json(cls, data: Dict[str, Any], max_depth: Optional[int] = None,
                  precision_bits: Optional[int] = None) -> "RpfSpec":
        """
        Build and validate a spec from its JSON document

        ``seed_form`` is either a form object {"p", "A", "B", "C"} or a
        three-entry list of integers / coefficient lists.
        """
        try:
            p = int(data["p"])
            k = int(data["k"])
            seeds = []
            ds = []
            for entry in data.get("terms", []):
                raw = entry["seed_form"]
                seeds.append(QuadraticForm.from_json(raw) if isinstance(raw, dict) else QuadraticForm.parse(raw, p))
                ds.append(float(entry["d"]))
            c0 = float(data.get("c0", 0.0))
            nu = float(data.get("nu", 0.0))
            eta = float(data.get("eta", 0.0))
        except (KeyError, TypeError, ValueError) as e:
            raise DomainError(f"malformed RPF spec: {e}") from e
        return build_spec(p, k, seeds, ds, c0=c0, nu=nu, eta=eta, max_depth=max_depth,
                          precision_bits=precision_bits)


def build_spec(p: int, k: int, seeds: Sequence[QuadraticForm], ds: Sequence[float],
               c0: float = 0.0, nu: float = 0.0, eta: float = 0.0,
               max_depth: Optional[int] = None, precision_bits: Optional[int] = None) -> RpfSpec:
    """
    Enumerate and validate the cycle of every seed, then assemble the spec

    Raises:
        SymmetryError: some class is not Hecke symmetric
        IncompleteEnumerationError: some cycle could not be certified at max_depth
    """
    if len(seeds) != len(ds):
        raise DomainError("every seed needs exactly one coefficient d")
    if precision_bits is None:
        precision_bits = get_config('Precision', 'precision_bits')
    bits = working_bits(k, precision_bits,
                        get_config('Precision', 'extended_bits'),
                        get_config('Precision', 'extended_from_k'))
    terms = []
    for seed, d in zip(seeds, ds):
        if seed.p != p:
            raise DomainError(f"seed {seed} belongs to p={seed.p}, spec has p={p}")
        terms.append(RpfTerm(enumerate_simple_cycle(seed, max_depth), d))
    spec = RpfSpec(p=p, k=k, terms=terms, c0=c0, nu=nu, eta=eta, bits=bits)
    logger.debug(f"spec p={p} k={k}: {len(terms)} class(es), {bits}-bit evaluation")
    return spec


def _matrix_mp(M: GroupElem) -> Tuple[mpmath.mpf, ...]:
    return tuple(e.to_mpf(mp.prec) for e in M.entries())


def slash(f: ComplexFn, M: GroupElem, weight: int) -> ComplexFn:
    """
    (f|M)(z) = (cz + d)^(-weight) f(Mz)

    Args:
        f: Function of one complex variable
        M: Group element
        weight: Positive even integer 2k

    Returns:
        The slashed function
    """
    if weight <= 0 or weight % 2:
        raise DomainError(f"slash weight must be a positive even integer, got {weight}")

    def slashed(z):
        a, b, c, d = _matrix_mp(M)
        z = mp.mpc(z)
        den = c * z + d
        return den ** (-weight) * f((a * z + b) / den)

    return slashed


def q0_eval(z, spec: RpfSpec) -> mpmath.mpc:
    """nu (1 - z^(-2k)), plus eta / z in weight 2"""
    z = mp.mpc(z)
    if z == 0:
        raise PoleError("q0 has a pole at z = 0", location=0)
    value = spec.nu * (1 - z ** (-2 * spec.k))
    if spec.k == 1:
        value += spec.eta / z
    return value


def _check_guard(z: mpmath.mpc, spec: RpfSpec) -> None:
    guard = get_config('Verification', 'pole_guard')
    for pole in spec.poles():
        if abs(z - pole) < guard:
            raise PoleProximityError(f"z = {z} lies within {guard} of the pole {mp.nstr(pole, 10)}",
                                     location=pole)


def qstar_eval(z, spec: RpfSpec) -> mpmath.mpc:
    """q*(z) = sum_l d_l sum_alpha Q_alpha(z)^(-k)"""
    z = mp.mpc(z)
    _check_guard(z, spec)
    total = mp.mpc(0)
    for d, forms, _ in spec.numeric_terms():
        inner = mp.mpc(0)
        for A, B, C in forms:
            inner += ((A * z + B) * z + C) ** (-spec.k)
        total += d * inner
    return total


def q_eval(z, spec: RpfSpec) -> mpmath.mpc:
    """q = q* + c0 q0"""
    value = qstar_eval(z, spec)
    if spec.c0:
        value += spec.c0 * q0_eval(z, spec)
    return value


def _sweep(name: str, spec: RpfSpec, samples: Sequence[complex], residual: ComplexFn,
           tolerance: Optional[float]) -> ResidualReport:
    if tolerance is None:
        tolerance = get_config('Verification', 'tolerance')
    report = ResidualReport(name, tolerance)
    with mp.workprec(spec.bits):
        for z in samples:
            report.add(z, abs(residual(z)))
    logger.check_event(name, max_residual=f"{report.max_residual:.3e}", passed=report.passed,
                       samples=report.n_samples)
    return report


def verify_relation1(spec: RpfSpec, samples: Sequence[complex],
                     tolerance: Optional[float] = None) -> ResidualReport:
    """max |(q|T)(z) + q(z)| over the samples"""
    _, T, _ = generators(spec.p)
    f = lambda z: q_eval(z, spec)
    fT = slash(f, T, spec.weight)
    return _sweep("rpf1", spec, samples, lambda z: fT(z) + f(z), tolerance)


def verify_relation2(spec: RpfSpec, samples: Sequence[complex],
                     tolerance: Optional[float] = None) -> ResidualReport:
    """max |sum_{j<p} (q|U^j)(z)| over the samples"""
    _, _, U = generators(spec.p)
    f = lambda z: q_eval(z, spec)
    pieces = [slash(f, U.power(j), spec.weight) for j in range(spec.p)]
    return _sweep("rpf2", spec, samples, lambda z: sum(piece(z) for piece in pieces), tolerance)


def verify_odd_symmetry(spec: RpfSpec, samples: Sequence[complex],
                        tolerance: Optional[float] = None) -> ResidualReport:
    """sum_alpha Q_alpha(z)^(-k) = -sum_alpha Q_alpha'(z)^(-k) over each cycle"""
    conj_forms = [[x.hecke_conjugate().form for x in term.cycle.members] for term in spec.terms]

    def residual(z):
        total = mp.mpc(0)
        for term, conj in zip(spec.terms, conj_forms):
            lhs = sum(x.form.evaluate(z) ** (-spec.k) for x in term.cycle.members)
            rhs = -sum(Q.evaluate(z) ** (-spec.k) for Q in conj)
            total += abs(lhs - rhs)
        return total

    return _sweep("odd_symmetry", spec, samples, residual, tolerance)


def growth_profile(spec: RpfSpec, heights: Sequence[float] = (1e2, 1e3, 1e4)) -> Dict[str, Any]:
    """
    Behaviour along z = iy: |q*(iy)| y^(2k) must stay bounded, |q0(iy)| too

    Returns:
        Scaled values per height and a verdict for each part
    """
    with mp.workprec(spec.bits):
        scaled = [float(abs(qstar_eval(1j * y, spec)) * mp.mpf(y) ** spec.weight) for y in heights]
        q0 = [float(abs(q0_eval(1j * y, spec))) for y in heights]
    bound = 2 * abs(spec.nu) + abs(spec.eta)
    return {
        "heights": list(heights),
        "qstar_scaled": scaled,
        "q0_abs": q0,
        "qstar_decay_ok": all(v <= 2 * scaled[0] + 1e-300 for v in scaled[1:]),
        "q0_bounded_ok": all(v <= bound + 1e-12 for v in q0),
    }


@dataclass
class PartialFractionData:
    """
    Coefficients of (alpha - alpha')^k / ((z - alpha)^k (z - alpha')^k)
    = sum_m a[m] / (z - alpha)^m + sum_n b[n] / (z - alpha')^n, m, n = 1..k
    """
    k: int
    alpha: mpmath.mpf
    alpha_c: mpmath.mpf
    a: Dict[int, mpmath.mpf]
    b: Dict[int, mpmath.mpf]

    def evaluate(self, z) -> mpmath.mpc:
        z = mp.mpc(z)
        return (sum(self.a[m] / (z - self.alpha) ** m for m in self.a)
                + sum(self.b[n] / (z - self.alpha_c) ** n for n in self.b))

    def original(self, z) -> mpmath.mpc:
        z = mp.mpc(z)
        return (self.alpha - self.alpha_c) ** self.k / ((z - self.alpha) ** self.k * (z - self.alpha_c) ** self.k)

    def recombination_error(self, z) -> float:
        return float(abs(self.evaluate(z) - self.original(z)))


def partial_fractions(k: int, alpha, alpha_c) -> PartialFractionData:
    """
    a_m = (-1)^(m-k) C(2k-m-1, k-1) (alpha - alpha')^(m-k)
    b_n = (-1)^k     C(2k-n-1, k-1) (alpha - alpha')^(n-k)
    """
    alpha = mp.mpf(alpha)
    alpha_c = mp.mpf(alpha_c)
    if alpha == alpha_c:
        raise DomainError("partial fractions need alpha != alpha'")
    delta = alpha - alpha_c
    a = {m: (-1) ** (m - k) * mp.binomial(2 * k - m - 1, k - 1) * delta ** (m - k) for m in range(1, k + 1)}
    b = {n: (-1) ** k * mp.binomial(2 * k - n - 1, k - 1) * delta ** (n - k) for n in range(1, k + 1)}
    return PartialFractionData(k, alpha, alpha_c, a, b)


@dataclass
class IntervalPair:
    """alpha in Z cap I_j paired with U^{j-1} alpha"""
    j: int
    alpha: HyperbolicPoint
    image: HyperbolicPoint


@dataclass
class IntervalGroup:
    """One class regrouped by interval index, with c_l = d_l / 2"""
    c: float
    pairs: List[IntervalPair]


@dataclass
class IntervalForm:
    """q*(z) = sum_l c_l sum_j sum_{alpha in Z cap I_j} (Q_alpha^(-k) - Q_{U^{j-1} alpha}^(-k))"""
    k: int
    bits: int
    groups: List[IntervalGroup]

    def evaluate(self, z) -> mpmath.mpc:
        with mp.workprec(self.bits):
            z = mp.mpc(z)
            total = mp.mpc(0)
            for group in self.groups:
                inner = mp.mpc(0)
                for pair in group.pairs:
                    inner += pair.alpha.form.evaluate(z) ** (-self.k) - pair.image.form.evaluate(z) ** (-self.k)
                total += group.c * inner
            return total


def qstar_interval_form(spec: RpfSpec) -> IntervalForm:
    """
    Regroup q* by interval index

    Raises:
        SymmetryError: an image U^{j-1} alpha is not the conjugate of a member
    """
    _, _, U = generators(spec.p)
    groups = []
    for term in spec.terms:
        cycle = term.cycle
        conj_keys = {x.hecke_conjugate().key() for x in cycle.members}
        pairs = []
        for j in range(2, spec.p + 1):
            Uj = U.power(j - 1)
            for alpha in cycle.members_in(j):
                image = alpha.apply(Uj)
                if image.key() not in conj_keys:
                    raise SymmetryError(f"U^{j - 1} image of {alpha} is not a conjugate of a member")
                pairs.append(IntervalPair(j, alpha, image))
        groups.append(IntervalGroup(term.d / 2, pairs))
    return IntervalForm(spec.k, spec.bits, groups)
