"""
Mellin Transforms and Remainder Terms
=====================================

For an automorphic integral F of weight 2k with rational period function
q = q* + c0 q0, the Mellin transform Phi(s) = int_0^inf F(iy) y^(s-1) dy
splits as Phi = D + E0 + E*, and the defect of the Hecke functional
equation is the remainder term

    Phi(2k - s) + Phi(s) = R(s) = -int_0^inf q*(iy) y^(s-1) dy.

R(s) is a combination of remainder atoms

    R(s; a, b) = (a - b)^k int_0^inf y^(s-1) / ((iy - a)^k (iy - b)^k) dy,

evaluated in closed form (Beta factors times terminating 2F1) or by
quadrature. Atoms carry exact hyperbolic points, so the operator
rho: R(s; a, b) -> R(s; U^{-1} a, U^{-1} b) and the cancellation in
R + rho R + ... + rho^{p-1} R = 0 are exact.
"""

import functools
from dataclasses import dataclass, field
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import mpmath
import sympy
from mpmath import mp

from algebra.hecke_group import generators
from algebra.lambda_ring import RingElem
from algebra.quadratic_forms import FormKey, HyperbolicPoint
from analysis.reports import ResidualReport
from analysis.rpf import RpfSpec, partial_fractions, q0_eval, qstar_eval
from analysis.special_functions import beta, hyp2f1_continued, hyp2f1_terminating
from config.config_manager import get_config
from utils.errors import AccuracyError, DomainError, PoleError
from utils.logger import get_logger
from utils.numerics import precision_tolerance, principal_power, relative_error
from utils.performance import profile_operation

logger = get_logger("mellin_remainder")

Real = Union[int, float, mpmath.mpf]
Point = Union[Real, HyperbolicPoint]

# Closed forms within this distance of an integer are evaluated through a
# Cauchy integral on a circle of radius LIMIT_RADIUS around that integer.
LIMIT_SWITCH = 0.05
LIMIT_RADIUS = 0.25
LIMIT_NODES = 48


def _tol() -> float:
    return get_config('Verification', 'tolerance')


def _tail_target(tol: float) -> float:
    return get_config('Quadrature', 'tail_fraction') * tol


def _quad(f, points: Sequence, tol: float, what: str) -> mpmath.mpc:
    with mp.workprec(mp.prec + get_config('Quadrature', 'guard_bits')):
        value, err = mp.quad(f, list(points), error=True, maxdegree=get_config('Quadrature', 'max_degree'))
    if err > tol * max(abs(value), 1):
        raise AccuracyError(f"{what}: quadrature error estimate {mp.nstr(err, 3)}", estimate=float(err))
    return +value


def _log_breakpoints(u_lo: mpmath.mpf, u_hi: mpmath.mpf, centers: Sequence[mpmath.mpf]) -> List[mpmath.mpf]:
    """Break points on [u_lo, u_hi] that are dense near the centers and sparse in the tails"""
    points = {u_lo, u_hi}
    for c in centers:
        for j in range(-1, 12):
            for off in (-(2 ** j), 2 ** j):
                u = c + off
                if u_lo < u < u_hi:
                    points.add(mp.mpf(u))
        if u_lo < c < u_hi:
            points.add(mp.mpf(c))
    return sorted(points)


# ---------------------------------------------------------------------------
# Fourier series and the entire part D
# ---------------------------------------------------------------------------

class SeriesValue(NamedTuple):
    value: mpmath.mpc
    tail_bound: mpmath.mpf


@dataclass
class FourierSeries:
    """
    F(z) = sum_{n >= 1} a_n exp(2 pi i n z / lambda), a_0 = 0

    Attributes:
        lambda_scale: Translation length lambda
        coeffs: a_1, ..., a_N
        weight: 2k
    """
    lambda_scale: mpmath.mpf
    coeffs: List[Real]
    weight: int

    def __post_init__(self):
        if self.weight <= 0 or self.weight % 2:
            raise DomainError(f"weight must be a positive even integer, got {self.weight}")
        self.lambda_scale = mp.mpf(self.lambda_scale)

    @property
    def k(self) -> int:
        return self.weight // 2

    @property
    def length(self) -> int:
        return len(self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "FourierSeries":
        try:
            p = int(data["lambda_p"])
            weight = int(data["weight"])
            coeffs = [float(c) for c in data["coeffs"]]
        except (KeyError, TypeError, ValueError) as e:
            raise DomainError(f"malformed Fourier coefficient document: {e}") from e
        if "a0" in data and float(data["a0"]) != 0:
            raise DomainError("constant term a_0 must vanish")
        return cls(RingElem.lam(p).to_mpf(mp.prec), coeffs, weight)

    def to_json(self, p: int) -> Dict[str, Any]:
        return {"lambda_p": p, "weight": self.weight, "coeffs": [float(c) for c in self.coeffs]}

    def _growth_constant(self) -> mpmath.mpf:
        """C with |a_n| <= C n^k on the stored range"""
        return max((abs(mp.mpf(a)) / mp.mpf(n) ** self.k for n, a in enumerate(self.coeffs, 1)),
                   default=mp.mpf(0))

    def evaluate(self, z) -> SeriesValue:
        """Truncated sum with a geometric tail estimate at Im z"""
        z = mp.mpc(z)
        if z.imag <= 0:
            raise DomainError("Fourier series needs Im z > 0")
        q = mp.exp(2j * mp.pi * z / self.lambda_scale)
        r = abs(q)
        total = mp.mpc(0)
        power = mp.mpc(1)
        C = self._growth_constant()
        for n, a in enumerate(self.coeffs, 1):
            power *= q
            total += a * power
            if n > 2 * self.k and C * mp.mpf(n) ** self.k * r ** n < mp.eps * (abs(total) + mp.eps):
                return SeriesValue(total, C * mp.mpf(n) ** self.k * r ** n)
        N = self.length
        ratio = r * (mp.mpf(N + 2) / (N + 1)) ** self.k
        tail = C * mp.mpf(N + 1) ** self.k * r ** (N + 1) / (1 - ratio) if ratio < 1 else mp.inf
        return SeriesValue(total, tail)


def phi_partial(s, series: FourierSeries, tolerance: Optional[float] = None) -> SeriesValue:
    """
    (2 pi / lambda)^(-s) Gamma(s) sum_{n <= N} a_n n^(-s)

    The Dirichlet tail is bounded with |a_n| <= C n^k, which needs Re s > k + 1.

    Raises:
        AccuracyError: the relative tail bound exceeds ``tolerance`` (when given)
    """
    s = mp.mpc(s)
    if series.is_zero():
        return SeriesValue(mp.mpc(0), mp.mpf(0))
    factor = (2 * mp.pi / series.lambda_scale) ** (-s) * mp.gamma(s)
    partial = mp.fsum(mp.mpf(a) * mp.mpf(n) ** (-s) for n, a in enumerate(series.coeffs, 1) if a)
    value = factor * partial
    excess = s.real - series.k - 1
    if excess > 0:
        tail = abs(factor) * series._growth_constant() * mp.mpf(series.length) ** (-excess) / excess
    else:
        tail = mp.inf
    if tolerance is not None and tail > tolerance * abs(value):
        raise AccuracyError(f"Dirichlet tail bound {mp.nstr(tail, 3)} too large at s={s}", estimate=float(tail))
    return SeriesValue(value, tail)


def D_eval(s, series: FourierSeries, tol: float = 1e-12) -> mpmath.mpc:
    """D(s) = int_1^inf F(iy) (y^s - y^(2k-s)) dy / y, an entire function of s"""
    s = mp.mpc(s)
    if series.is_zero():
        return mp.mpc(0)
    k2 = series.weight
    lam = series.lambda_scale
    rate = 2 * mp.pi / lam
    m0 = mp.fsum(abs(mp.mpf(a)) * mp.exp(-rate * (n - 1)) for n, a in enumerate(series.coeffs, 1))
    expo = max(s.real, k2 - s.real)
    target = _tail_target(tol)
    Y = mp.mpf(2)
    while 2 * m0 * Y ** max(expo - 1, 0) * mp.exp(-rate * Y) / rate > target:
        Y += 1
    logger.debug(f"D({mp.nstr(s, 6)}): truncation at y = {Y}")

    def integrand(y):
        F = series.evaluate(1j * y).value
        return F * (y ** (s - 1) - y ** (k2 - s - 1))

    points = [1] + [mp.mpf(x) for x in range(2, int(Y), 2)] + [Y]
    return _quad(integrand, points, tol, "D_eval")


def dirichlet_consistency(series: FourierSeries, s) -> Dict[str, float]:
    """Relative gap between D(s) and the truncated Dirichlet series at a point of absolute convergence"""
    partial = phi_partial(s, series)
    d_value = D_eval(s, series)
    return {
        "s": float(mp.mpc(s).real),
        "relative_error": relative_error(partial.value, d_value),
        "tail_bound": float(partial.tail_bound / max(abs(partial.value), mp.eps)),
    }


# ---------------------------------------------------------------------------
# E0 and E*
# ---------------------------------------------------------------------------

def E0_eval(s, spec: RpfSpec) -> mpmath.mpc:
    """
    E0(s) = -c0 nu (1/(s - 2k) + 1/s), plus i c0 eta / (s - 1) in weight 2

    Raises:
        PoleError: at s = 0, 2k (residue -c0 nu) and s = 1 in weight 2 (residue i c0 eta)
    """
    s = mp.mpc(s)
    k2 = spec.weight
    c0nu = mp.mpf(spec.c0) * spec.nu
    if c0nu and (s == 0 or s == k2):
        raise PoleError(f"E0 has a pole at s = {int(s.real)}", location=int(s.real), residue=-c0nu)
    value = mp.mpc(0)
    if c0nu:
        value -= c0nu * (1 / (s - k2) + 1 / s)
    if spec.k == 1 and spec.c0 and spec.eta:
        if s == 1:
            raise PoleError("E0 has a pole at s = 1", location=1, residue=1j * spec.c0 * spec.eta)
        value += 1j * spec.c0 * spec.eta / (s - 1)
    return value


def E0_quadrature(s, spec: RpfSpec, tol: float = 1e-12) -> mpmath.mpc:
    """-int_1^inf c0 q0(iy) y^(2k-s-1) dy, convergent for Re s > 2k"""
    s = mp.mpc(s)
    if s.real <= spec.weight:
        raise DomainError("E0 quadrature needs Re s > 2k")
    f = lambda y: -spec.c0 * q0_eval(1j * y, spec) * y ** (spec.weight - s - 1)
    return _quad(f, [1, 2, 10, mp.inf], tol, "E0_quadrature")


def _qstar_bounds(spec: RpfSpec) -> Tuple[mpmath.mpf, mpmath.mpf]:
    """(M0, Minf) with |q*(iy)| <= M0 for all y and |q*(iy)| <= Minf y^(-2k)"""
    m0 = mp.mpf(0)
    minf = mp.mpf(0)
    for d, forms, _ in spec.numeric_terms():
        for A, _, C in forms:
            m0 += abs(d) / abs(C) ** spec.k
            minf += abs(d) / abs(A) ** spec.k
    return m0, minf


def _estar_quadrature(s, spec: RpfSpec, tol: float) -> mpmath.mpc:
    s = mp.mpc(s)
    if s.real <= 0:
        raise DomainError("E* quadrature needs Re s > 0")
    _, minf = _qstar_bounds(spec)
    if minf == 0:
        return mp.mpc(0)
    target = _tail_target(tol)
    u_hi = max(mp.log(minf / (target * s.real)) / s.real, mp.mpf(4))
    f = lambda u: -qstar_eval(1j * mp.exp(u), spec) * mp.exp((spec.weight - s) * u)
    return _quad(f, _log_breakpoints(mp.mpf(0), u_hi, [mp.mpf(0)]), tol, "Estar quadrature")


def _estar_hypergeometric(s, spec: RpfSpec, tol: float) -> mpmath.mpc:
    """
    Partial fractions of every pole pair, each piece integrated in closed form:
    int_1^inf y^(2k-s) (iy - a)^(-m) dy/y = i^(-m) I(s - 2k + m, m; -i a)
    """
    s = mp.mpc(s)
    k = spec.k
    total = mp.mpc(0)
    for term, (d, _, _) in zip(spec.terms, spec.numeric_terms()):
        D = term.seed.discriminant().to_mpf(mp.prec)
        scale = d * D ** (-mp.mpf(k) / 2)
        inner = mp.mpc(0)
        for alpha in term.cycle.members:
            a = alpha.to_mpf()
            ac = alpha.hecke_conjugate().to_mpf()
            pf = partial_fractions(k, a, ac)
            for m, coeff in pf.a.items():
                inner += coeff * mp.power(1j, -m) * hyp2f1_continued(m, s, -1j * a, k=k, tol=tol)
            for n, coeff in pf.b.items():
                inner += coeff * mp.power(1j, -n) * hyp2f1_continued(n, s, -1j * ac, k=k, tol=tol)
        total += scale * inner
    return -total


def Estar_eval(s, spec: RpfSpec, method: str = "hypergeometric", tol: Optional[float] = None) -> mpmath.mpc:
    """
    E*(s) = -int_1^inf q*(iy) y^(2k-s) dy / y

    Args:
        s: Mellin variable
        spec: RPF data
        method: ``"quadrature"`` (Re s > 0) or ``"hypergeometric"`` (any s off the
                poles 2k-1, 2k-2, ...)
    """
    with mp.workprec(spec.bits):
        tol = precision_tolerance() if tol is None else tol
        if not spec.terms:
            return mp.mpc(0)
        if method == "quadrature":
            return _estar_quadrature(s, spec, tol)
        if method == "hypergeometric":
            return _estar_hypergeometric(s, spec, tol)
    raise DomainError(f"unknown E* method {method!r}")


def Estar_alt(s, spec: RpfSpec, tol: Optional[float] = None) -> mpmath.mpc:
    """-int_0^1 q*(iy) y^(s-1) dy, equal to E*(s) for 0 < Re s < 2k"""
    with mp.workprec(spec.bits):
        tol = precision_tolerance() if tol is None else tol
        s = mp.mpc(s)
        _check_strip(s, spec.k)
        if not spec.terms:
            return mp.mpc(0)
        m0, _ = _qstar_bounds(spec)
        u_lo = min(mp.log(_tail_target(tol) * s.real / m0) / s.real, mp.mpf(-4))
        f = lambda u: -qstar_eval(1j * mp.exp(u), spec) * mp.exp(s * u)
        return _quad(f, _log_breakpoints(u_lo, mp.mpf(0), [mp.mpf(0)]), tol, "Estar_alt")


def scan_estar_poles(spec: RpfSpec, lo: int, hi: int, radius: float = 1e-4,
                     threshold: float = 1e-8) -> Dict[int, float]:
    """
    Numeric residues of the continued E* at the integers lo..hi

    The residue at n is estimated by the 4-point Cauchy sum
    (1/4) sum_j h w^j E*(n + h w^j), w = i.

    Returns:
        {n: |residue|} for the integers where it exceeds ``threshold``
    """
    found = {}
    with mp.workprec(max(spec.bits, 128)):
        for n in range(lo, hi + 1):
            res = mp.mpc(0)
            for w in (1, 1j, -1, -1j):
                h = radius * w
                res += h * Estar_eval(n + h, spec, "hypergeometric")
            res /= 4
            if abs(res) > threshold:
                found[n] = float(abs(res))
    logger.debug(f"E* poles in [{lo}, {hi}]: {sorted(found)}")
    return found


# ---------------------------------------------------------------------------
# Remainder atoms
# ---------------------------------------------------------------------------

def _check_strip(s: mpmath.mpc, k: int) -> None:
    if not 0 < s.real < 2 * k:
        raise DomainError(f"s = {mp.nstr(s, 6)} lies outside the strip 0 < Re s < {2 * k}")


@functools.lru_cache(maxsize=4096)
def _point_value(point: HyperbolicPoint, bits: int) -> mpmath.mpf:
    return point.to_mpf(bits)


def _real(x: Point) -> mpmath.mpf:
    if isinstance(x, HyperbolicPoint):
        return _point_value(x, mp.prec)
    return mp.mpf(x)


def _atom_formula(s: mpmath.mpc, a: mpmath.mpf, b: mpmath.mpf, k: int) -> mpmath.mpc:
    """The closed form away from the integers; may raise PoleError"""
    delta, eps, orient = a, b, 1
    if delta / (delta - eps) <= 0:
        # The integrand is symmetric in (delta, eps); only (a - b)^k changes sign.
        delta, eps, orient = b, a, (-1) ** k
    z = eps / (eps - delta)
    first = principal_power(delta, s - k) * beta(2 * k - s, s - k) * hyp2f1_terminating(k, k - s + 1, z)
    second = principal_power(eps, s - k) * beta(s, k - s) * hyp2f1_terminating(k, s - k + 1, z)
    return orient * principal_power(1j, s) * (first + second)


def _cauchy_limit(f, s: mpmath.mpc, center: int) -> mpmath.mpc:
    """f(s) from values on the circle |zeta - center| = LIMIT_RADIUS (trapezoid rule)"""
    total = mp.mpc(0)
    for j in range(LIMIT_NODES):
        offset = LIMIT_RADIUS * mp.expjpi(mp.mpf(2 * j) / LIMIT_NODES)
        zeta = center + offset
        total += f(zeta) * offset / (zeta - s)
    return total / LIMIT_NODES


def atom_closed(s, a: Point, b: Point, k: int, allow_limit: bool = True) -> mpmath.mpc:
    """
    Closed form of R(s; a, b) for 0 < Re s < 2k

    Args:
        s: Point of the strip
        a, b: Distinct nonzero reals (or hyperbolic points)
        k: Positive integer
        allow_limit: Near integer s the Beta terms have canceling poles; when
                     True the analytic value is recovered by a Cauchy integral,
                     otherwise PoleError is raised

    Returns:
        (a - b)^k int_0^inf y^(s-1) / ((iy - a)^k (iy - b)^k) dy
    """
    s = mp.mpc(s)
    _check_strip(s, k)
    a, b = _real(a), _real(b)
    if a == 0 or b == 0 or a == b:
        raise DomainError(f"atom needs distinct nonzero points, got a={a}, b={b}")
    n = int(mp.nint(s.real))
    if 0 < n < 2 * k and abs(s - n) < LIMIT_SWITCH:
        if not allow_limit:
            raise PoleError(f"closed form has canceling Beta poles at s = {n}", location=n)
        return _cauchy_limit(lambda z: _atom_formula(z, a, b, k), s, n)
    return _atom_formula(s, a, b, k)


def atom_quadrature(s, a: Point, b: Point, k: int, tol: float = 1e-12) -> mpmath.mpc:
    """
    R(s; a, b) by quadrature in u = log y over a truncated line

    Tails: |integrand| <= |a-b|^k / |ab|^k y^(Re s - 1) as y -> 0 and
    <= |a-b|^k y^(Re s - 1 - 2k) as y -> inf.
    """
    s = mp.mpc(s)
    _check_strip(s, k)
    a, b = _real(a), _real(b)
    if a == 0 or b == 0 or a == b:
        raise DomainError(f"atom needs distinct nonzero points, got a={a}, b={b}")
    sigma = s.real
    gap = abs(a - b) ** k
    target = _tail_target(tol)
    u_lo = mp.log(target * sigma * abs(a * b) ** k / gap) / sigma
    u_hi = mp.log(target * (2 * k - sigma) / gap) / (sigma - 2 * k)
    centers = [mp.log(abs(a)), mp.log(abs(b))]
    u_lo = min(u_lo, min(centers) - 4)
    u_hi = max(u_hi, max(centers) + 4)

    def integrand(u):
        y = mp.exp(u)
        return mp.exp(s * u) / ((1j * y - a) ** k * (1j * y - b) ** k)

    return (a - b) ** k * _quad(integrand, _log_breakpoints(u_lo, u_hi, centers), tol, "atom_quadrature")


def reflection_residual(s, a: Real, b: Real, k: int, p: int) -> float:
    """|R(s; U^{-1}a, U^{-1}b) + R(2k - s; a - lambda, b - lambda)| with U^{-1} z = 1/(lambda - z)"""
    lam = RingElem.lam(p).to_mpf(mp.prec)
    a, b = mp.mpf(a), mp.mpf(b)
    lhs = atom_closed(s, 1 / (lam - a), 1 / (lam - b), k)
    rhs = -atom_closed(2 * k - mp.mpc(s), a - lam, b - lam, k)
    return float(abs(lhs - rhs))


# ---------------------------------------------------------------------------
# The remainder term R(s)
# ---------------------------------------------------------------------------

def R_closed(s, spec: RpfSpec) -> mpmath.mpc:
    """R(s) = -sum_l d_l D_l^(-k/2) sum_alpha R(s; alpha, alpha')"""
    with mp.workprec(spec.bits):
        s = mp.mpc(s)
        _check_strip(s, spec.k)
        total = mp.mpc(0)
        for term in spec.terms:
            D = term.seed.discriminant().to_mpf(mp.prec)
            inner = mp.fsum(atom_closed(s, alpha, alpha.hecke_conjugate(), spec.k)
                            for alpha in term.cycle.members)
            total += mp.mpf(term.d) * D ** (-mp.mpf(spec.k) / 2) * inner
        return -total


def R_quadrature(s, spec: RpfSpec, tol: float = 1e-12) -> mpmath.mpc:
    """R(s) = -int_0^inf q*(iy) y^(s-1) dy"""
    with mp.workprec(spec.bits):
        s = mp.mpc(s)
        _check_strip(s, spec.k)
        if not spec.terms:
            return mp.mpc(0)
        m0, minf = _qstar_bounds(spec)
        sigma = s.real
        target = _tail_target(tol)
        u_lo = min(mp.log(target * sigma / m0) / sigma, mp.mpf(-4))
        u_hi = max(mp.log(target * (2 * spec.k - sigma) / minf) / (sigma - 2 * spec.k), mp.mpf(4))
        f = lambda u: -qstar_eval(1j * mp.exp(u), spec) * mp.exp(s * u)
        return _quad(f, _log_breakpoints(u_lo, u_hi, [mp.mpf(0)]), tol, "R_quadrature")


@dataclass(frozen=True)
class RemainderAtom:
    """coeff * R(s; a, b), with a symbolic coefficient"""
    coeff: sympy.Expr
    a: HyperbolicPoint
    b: HyperbolicPoint
    k: int

    def key(self) -> Tuple[FormKey, FormKey]:
        return self.a.key(), self.b.key()

    def oriented(self) -> "RemainderAtom":
        """Order (a, b) by key; R(s; b, a) = (-1)^k R(s; a, b)"""
        if self.a.key() <= self.b.key():
            return self
        return RemainderAtom(self.coeff * (-1) ** self.k, self.b, self.a, self.k)

    def to_json(self) -> Dict[str, Any]:
        return {"coeff": str(self.coeff),
                "a": mp.nstr(_point_value(self.a, 64), 12),
                "b": mp.nstr(_point_value(self.b, 64), 12)}


@dataclass
class RemainderExpr:
    """Formal linear combination of remainder atoms"""
    atoms: List[RemainderAtom]
    p: int
    k: int
    weights: Dict[sympy.Symbol, mpmath.mpf] = field(default_factory=dict)

    def merged(self) -> "RemainderExpr":
        """Orient every atom, add coefficients of equal keys, drop zeros"""
        sums: Dict[Tuple[FormKey, FormKey], RemainderAtom] = {}
        for atom in self.atoms:
            atom = atom.oriented()
            key = atom.key()
            if key in sums:
                prev = sums[key]
                sums[key] = RemainderAtom(prev.coeff + atom.coeff, prev.a, prev.b, self.k)
            else:
                sums[key] = atom
        atoms = []
        for key in sorted(sums):
            coeff = sympy.expand(sums[key].coeff)
            if coeff != 0:
                atoms.append(RemainderAtom(coeff, sums[key].a, sums[key].b, self.k))
        return RemainderExpr(atoms, self.p, self.k, self.weights)

    def is_empty(self) -> bool:
        return not self.atoms

    def __add__(self, other: "RemainderExpr") -> "RemainderExpr":
        if (other.p, other.k) != (self.p, self.k):
            raise DomainError("cannot add remainder expressions of different groups or weights")
        return RemainderExpr(self.atoms + other.atoms, self.p, self.k, {**self.weights, **other.weights})

    def same_as(self, other: "RemainderExpr") -> bool:
        mine = {a.key(): a.coeff for a in self.merged().atoms}
        theirs = {a.key(): a.coeff for a in other.merged().atoms}
        return mine.keys() == theirs.keys() and all(sympy.expand(mine[k] - theirs[k]) == 0 for k in mine)

    def coefficient_value(self, coeff: sympy.Expr) -> mpmath.mpf:
        """Integer combination of the weight symbols, evaluated at working precision"""
        return mp.fsum(int(c) * self.weights[sym] for sym, c in coeff.as_coefficients_dict().items())

    def evaluate(self, s) -> mpmath.mpc:
        """Numeric value through the closed form of every atom"""
        return mp.fsum(self.coefficient_value(atom.coeff) * atom_closed(s, atom.a, atom.b, self.k)
                       for atom in self.atoms)

    def to_json(self) -> Dict[str, Any]:
        return {"p": self.p, "k": self.k, "atoms": [a.to_json() for a in self.atoms]}


def remainder_expr(spec: RpfSpec) -> RemainderExpr:
    """
    R(s) = sum_l w_l sum_j sum_{alpha in Z cap I_j} [R(s; alpha, alpha') - R(s; U^{j-1}alpha, (U^{j-1}alpha)')]
    with w_l = -c_l D_l^(-k/2), c_l = d_l / 2
    """
    _, _, U = generators(spec.p)
    atoms: List[RemainderAtom] = []
    weights: Dict[sympy.Symbol, mpmath.mpf] = {}
    with mp.workprec(spec.bits):
        for idx, term in enumerate(spec.terms):
            w = sympy.Symbol(f"w{idx}")
            D = term.seed.discriminant().to_mpf(mp.prec)
            weights[w] = -(mp.mpf(term.d) / 2) * D ** (-mp.mpf(spec.k) / 2)
            for j in range(2, spec.p + 1):
                Uj = U.power(j - 1)
                for alpha in term.cycle.members_in(j):
                    image = alpha.apply(Uj)
                    atoms.append(RemainderAtom(w, alpha, alpha.hecke_conjugate(), spec.k))
                    atoms.append(RemainderAtom(-w, image, image.hecke_conjugate(), spec.k))
    return RemainderExpr(atoms, spec.p, spec.k, weights)


def rho(expr: RemainderExpr) -> RemainderExpr:
    """R(s; a, b) -> R(s; U^{-1}a, U^{-1}b), extended linearly"""
    _, _, U = generators(expr.p)
    U_inv = U.inverse()
    atoms = [RemainderAtom(atom.coeff, atom.a.apply(U_inv), atom.b.apply(U_inv), expr.k)
             for atom in expr.atoms]
    return RemainderExpr(atoms, expr.p, expr.k, expr.weights).merged()


@profile_operation("verify_second_relation")
def verify_second_relation(spec: RpfSpec, grid: Sequence[complex],
                           tolerance: Optional[float] = None) -> ResidualReport:
    """
    R + rho(R) + ... + rho^{p-1}(R) = 0, symbolically by exact cancellation and
    numerically on the grid; also checks rho^p = identity
    """
    tolerance = _tol() if tolerance is None else tolerance
    report = ResidualReport("r2", tolerance)
    expr = remainder_expr(spec)
    powers = [expr.merged()]
    for _ in range(spec.p - 1):
        powers.append(rho(powers[-1]))
    raw = RemainderExpr([a for e in powers for a in e.atoms], spec.p, spec.k, expr.weights)
    total = raw.merged()
    rho_order = rho(powers[-1]).same_as(powers[0]) if powers[0].atoms else True

    report.details.update({
        "atoms_initial": len(expr.atoms),
        "atoms_merged": len(powers[0].atoms),
        "atoms_before_cancellation": len(raw.atoms),
        "atoms_after_cancellation": len(total.atoms),
        "symbolic_cancellation": total.is_empty(),
        "rho_order_p": rho_order,
        "trace": [e.to_json()["atoms"] for e in powers],
    })
    if not total.is_empty():
        report.fail("symbolic sum does not cancel")
        report.details["witness"] = total.to_json()["atoms"][:4]
    if not rho_order:
        report.fail("rho^p differs from the identity")

    with mp.workprec(spec.bits):
        for s in grid:
            report.add(s, abs(mp.fsum(e.evaluate(s) for e in powers)))
    logger.check_event("r2", symbolic=total.is_empty(), max_residual=f"{report.max_residual:.3e}")
    return report


def first_relation_check(spec: RpfSpec, grid: Sequence[complex],
                         tolerance: Optional[float] = None) -> ResidualReport:
    """R(2k - s) - R(s) with both evaluators, plus closed form against quadrature"""
    tolerance = _tol() if tolerance is None else tolerance
    report = ResidualReport("r1", tolerance)
    cross = []
    with mp.workprec(spec.bits):
        for s in grid:
            s = mp.mpc(s)
            closed_s, closed_r = R_closed(s, spec), R_closed(2 * spec.k - s, spec)
            quad_s, quad_r = R_quadrature(s, spec), R_quadrature(2 * spec.k - s, spec)
            report.add(complex(s), max(abs(closed_r - closed_s), abs(quad_r - quad_s)))
            cross.append(relative_error(closed_s, quad_s))
    report.details["closed_vs_quadrature_max_rel"] = max(cross, default=0.0)
    if cross and max(cross) > 1e-7:
        report.fail("closed form and quadrature disagree")
    return report


# ---------------------------------------------------------------------------
# Functional equation and inverse Mellin
# ---------------------------------------------------------------------------

def Phi_eval(s, series: Optional[FourierSeries], spec: Optional[RpfSpec]) -> mpmath.mpc:
    """Phi = D + E0 + E*"""
    value = mp.mpc(0)
    if series is not None:
        value += D_eval(s, series)
    if spec is not None:
        value += E0_eval(s, spec) + Estar_eval(s, spec, "hypergeometric")
    return value


def functional_equation_check(series: Optional[FourierSeries], spec: Optional[RpfSpec],
                              grid: Sequence[complex], tolerance: Optional[float] = None) -> ResidualReport:
    """max |Phi(2k - s) + Phi(s) - R(s)| over the grid"""
    tolerance = _tol() if tolerance is None else tolerance
    if series is not None and spec is not None and series.weight != spec.weight:
        raise DomainError(f"series weight {series.weight} differs from spec weight {spec.weight}")
    weight = series.weight if series is not None else (spec.weight if spec is not None else None)
    report = ResidualReport("fe", tolerance)
    if weight is None:
        for s in grid:
            report.add(s, 0.0)
        return report
    bits = spec.bits if spec is not None else get_config('Precision', 'precision_bits')
    with mp.workprec(bits):
        for s in grid:
            s = mp.mpc(s)
            lhs = Phi_eval(weight - s, series, spec) + Phi_eval(s, series, spec)
            rhs = R_closed(s, spec) if spec is not None and spec.terms else mp.mpc(0)
            report.add(complex(s), abs(lhs - rhs))
    return report


def boundedness_profile(series: Optional[FourierSeries], spec: Optional[RpfSpec],
                        ts: Sequence[float] = (10, 20, 40, 80)) -> Dict[str, Any]:
    """|Phi(k + it)| along a vertical line; recorded, not asserted"""
    k = series.k if series is not None else spec.k
    values = [float(abs(Phi_eval(mp.mpc(k, t), series, spec))) for t in ts]
    tail = [v for t, v in zip(ts, values) if t >= 20]
    non_increasing = all(b <= 1.1 * a for a, b in zip(tail, tail[1:]))
    return {"sigma": k, "t": list(ts), "abs_phi": values, "non_increasing_beyond_20": non_increasing}


def inverse_mellin_check(a: Real, b: Real, k: int, y: Real, d: Real, T: Real,
                         tol: float = 1e-10) -> Dict[str, Any]:
    """
    (1/2 pi i) int_{d-iT}^{d+iT} R(s; a, b) y^(-s) ds against (a-b)^k / ((iy-a)^k (iy-b)^k)

    Returns:
        error, truncation estimate and both values
    """
    y, d, T = mp.mpf(y), mp.mpf(d), mp.mpf(T)
    if not 0 < d < 2 * k:
        raise DomainError(f"abscissa d must lie in (0, {2 * k})")
    a, b = mp.mpf(a), mp.mpf(b)
    exact = (a - b) ** k / ((1j * y - a) ** k * (1j * y - b) ** k)

    def integrand(t):
        s = mp.mpc(d, t)
        return atom_closed(s, a, b, k) * y ** (-s)

    step = mp.mpf(5)
    n = int(mp.ceil(T / step))
    points = [-T + 2 * T * i / (2 * n) for i in range(2 * n + 1)]
    value = _quad(integrand, points, tol, "inverse_mellin") / (2 * mp.pi)
    edge = abs(integrand(T)) + abs(integrand(-T))
    return {
        "value": complex(value),
        "exact": complex(exact),
        "error": float(abs(value - exact)),
        "truncation_estimate": float(edge / (2 * mp.pi)),
        "T": float(T),
    }
