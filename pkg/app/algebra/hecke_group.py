"""
Hecke Groups
============

Projective 2x2 matrices over Z[lambda_p] with determinant one, the generators
S = [[1, lambda], [0, 1]], T = [[0, -1], [1, 0]], U = ST, classification by
trace, Moebius action, and the decomposition of the real line into the
intervals I_j cut out by the points U^j(0).
"""

from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import mpmath
import numpy as np
from mpmath import mp

from algebra.lambda_ring import RingElem, sign
from utils.errors import DomainError
from utils.logger import get_logger

logger = get_logger("hecke_group")

INFINITY = mp.inf


class GroupElem:
    """
    Element of the Hecke group G_p, stored as its canonical projective representative

    The matrix and its negative are identified; the representative has its
    first nonzero entry among (c, a) positive.

    Args:
        a, b, c, d: Matrix entries
        p: Group index
    """

    __slots__ = ('a', 'b', 'c', 'd', 'p')

    def __init__(self, a: RingElem, b: RingElem, c: RingElem, d: RingElem, p: int):
        if any(e.p != p for e in (a, b, c, d)):
            raise DomainError(f"matrix entries do not all belong to Z[lambda_{p}]")
        if a * d - b * c != 1:
            raise DomainError("determinant is not one")
        lead = c if not c.is_zero() else a
        if sign(lead) < 0:
            a, b, c, d = -a, -b, -c, -d
        object.__setattr__(self, 'a', a)
        object.__setattr__(self, 'b', b)
        object.__setattr__(self, 'c', c)
        object.__setattr__(self, 'd', d)
        object.__setattr__(self, 'p', p)

    def __setattr__(self, name, value):
        raise AttributeError("GroupElem is immutable")

    @classmethod
    def from_ints(cls, rows: Sequence[Sequence[int]], p: int) -> "GroupElem":
        (a, b), (c, d) = rows
        return cls(*(RingElem.from_int(e, p) for e in (a, b, c, d)), p)

    @classmethod
    def identity(cls, p: int) -> "GroupElem":
        return cls.from_ints([[1, 0], [0, 1]], p)

    def entries(self) -> Tuple[RingElem, RingElem, RingElem, RingElem]:
        return self.a, self.b, self.c, self.d

    def compose(self, other: "GroupElem") -> "GroupElem":
        """Matrix product self * other"""
        if other.p != self.p:
            raise DomainError(f"mismatched group index: {self.p} vs {other.p}")
        return GroupElem(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
            self.p,
        )

    __matmul__ = compose

    def inverse(self) -> "GroupElem":
        return GroupElem(self.d, -self.b, -self.c, self.a, self.p)

    def power(self, n: int) -> "GroupElem":
        """self**n for any integer n, by repeated squaring"""
        base = self if n >= 0 else self.inverse()
        n = abs(n)
        result = GroupElem.identity(self.p)
        while n:
            if n & 1:
                result = result.compose(base)
            base = base.compose(base)
            n >>= 1
        return result

    def trace(self) -> RingElem:
        return self.a + self.d

    def is_identity(self) -> bool:
        return self == GroupElem.identity(self.p)

    def key(self) -> Tuple[int, Tuple[Tuple[int, ...], ...]]:
        return self.p, tuple(e.coeffs for e in self.entries())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GroupElem):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def to_json(self) -> Dict[str, object]:
        return {"p": self.p, "a": self.a.to_json(), "b": self.b.to_json(),
                "c": self.c.to_json(), "d": self.d.to_json()}

    @classmethod
    def from_json(cls, data: Dict[str, object]) -> "GroupElem":
        try:
            p = int(data["p"])
            entries = [RingElem.from_json(data[name], p) for name in ("a", "b", "c", "d")]
        except (KeyError, TypeError, ValueError) as e:
            raise DomainError(f"malformed group element: {e}") from e
        return cls(*entries, p)

    def __repr__(self) -> str:
        return f"GroupElem([[{self.a}, {self.b}], [{self.c}, {self.d}]])"


def generators(p: int) -> Tuple[GroupElem, GroupElem, GroupElem]:
    """
    The generators S, T and U = ST of G_p

    Args:
        p: Group index, p >= 3

    Returns:
        (S, T, U)
    """
    if p < 3:
        raise DomainError(f"Hecke group index must be >= 3, got {p}")
    one = RingElem.one(p)
    zero = RingElem.zero(p)
    lam = RingElem.lam(p)
    S = GroupElem(one, lam, zero, one, p)
    T = GroupElem(zero, -one, one, zero, p)
    return S, T, S.compose(T)


def word(letters: Iterable[str], p: int) -> GroupElem:
    """
    Product of generators read left to right

    Letters: ``S``, ``s`` (S inverse), ``T``, ``U``, ``u`` (U inverse).
    """
    S, T, U = generators(p)
    table = {'S': S, 's': S.inverse(), 'T': T, 'U': U, 'u': U.inverse()}
    result = GroupElem.identity(p)
    for letter in letters:
        if letter not in table:
            raise DomainError(f"unknown generator letter {letter!r}")
        result = result.compose(table[letter])
    return result


def compose(M: GroupElem, N: GroupElem) -> GroupElem:
    return M.compose(N)


def inverse(M: GroupElem) -> GroupElem:
    return M.inverse()


def power(M: GroupElem, n: int) -> GroupElem:
    return M.power(n)


def classify(M: GroupElem) -> str:
    """
    Classify an element by |trace| against 2

    Returns:
        ``"hyperbolic"``, ``"parabolic"`` or ``"elliptic"``
    """
    tr = M.trace()
    gap = sign(tr * tr - 4)
    if gap > 0:
        return "hyperbolic"
    if gap == 0:
        return "parabolic"
    return "elliptic"


def fixed_points(M: GroupElem):
    """
    The two real fixed points of a hyperbolic element with c != 0

    Returns:
        (alpha, alpha_conjugate) as HyperbolicPoints; alpha is the plus branch
        of the form [c, d - a, -b] of M normalised to positive trace
    """
    from algebra.quadratic_forms import form_from_matrix, HyperbolicPoint

    if classify(M) != "hyperbolic":
        raise DomainError("fixed_points needs a hyperbolic element")
    if M.c.is_zero():
        raise DomainError("fixed point at infinity: c = 0")
    form = form_from_matrix(M)
    alpha = HyperbolicPoint(form, "plus")
    return alpha, alpha.hecke_conjugate()


def _entries_mp(M: GroupElem) -> List[mpmath.mpf]:
    return [e.to_mpf(mp.prec) for e in M.entries()]


def mobius_apply(M: GroupElem, z: Union[complex, mpmath.mpc, mpmath.mpf]) -> Union[mpmath.mpc, mpmath.mpf]:
    """
    Numeric Moebius image (az + b)/(cz + d)

    ``INFINITY`` is accepted as input and returned when z is mapped to infinity.
    """
    a, b, c, d = _entries_mp(M)
    if z == INFINITY:
        if M.c.is_zero():
            return INFINITY
        return a / c
    z = mp.mpc(z) if isinstance(z, (complex, mpmath.mpc)) else mp.mpf(z)
    den = c * z + d
    if abs(den) <= mp.eps * 8 * (abs(c * z) + abs(d)):
        return INFINITY
    return (a * z + b) / den


@dataclass(frozen=True)
class Endpoint:
    """The point U^j(0) = b/d, exact numerator and denominator plus its value"""
    j: int
    num: RingElem
    den: RingElem
    value: mpmath.mpf

    @property
    def is_infinite(self) -> bool:
        return self.den.is_zero()


@dataclass(frozen=True)
class IntervalDecomposition:
    """
    Endpoints 0 = U^p(0) < U^{p-1}(0) < ... < U^2(0) < U(0) = infinity

    ``endpoints`` is listed for j = p, p-1, ..., 1, i.e. in increasing order.
    I_1 = [-infinity, 0) and I_j = [U^{p-j+2}(0), U^{p-j+1}(0)) for j >= 2.
    """
    p: int
    endpoints: Tuple[Endpoint, ...]

    def bounds(self, j: int) -> Tuple[Optional[Endpoint], Endpoint]:
        """(left, right) endpoints of I_j; left is None for I_1"""
        if not 1 <= j <= self.p:
            raise DomainError(f"interval index must lie in 1..{self.p}, got {j}")
        if j == 1:
            return None, self.endpoints[0]
        return self.endpoints[j - 2], self.endpoints[j - 1]

    def to_json(self) -> Dict[str, object]:
        return {
            "p": self.p,
            "endpoints": [
                {"j": e.j, "num": e.num.to_json(), "den": e.den.to_json(),
                 "value": "inf" if e.is_infinite else mp.nstr(e.value, 15)}
                for e in self.endpoints
            ],
        }


def interval_decomposition(p: int) -> IntervalDecomposition:
    """Build the decomposition of the real line for G_p"""
    _, _, U = generators(p)
    endpoints = []
    for j in range(p, 0, -1):
        Uj = U.power(j)
        num, den = Uj.b, Uj.d
        if den.is_zero():
            value = INFINITY
        else:
            value = num.to_mpf(mp.prec) / den.to_mpf(mp.prec)
        endpoints.append(Endpoint(j, num, den, value))
    return IntervalDecomposition(p, tuple(endpoints))


def _below(x, endpoint: Endpoint) -> bool:
    """x < endpoint, exactly for points that can compare against fractions"""
    if endpoint.is_infinite:
        return True
    if hasattr(x, "compare_fraction"):
        return x.compare_fraction(endpoint.num, endpoint.den) < 0
    return mp.mpf(x) < endpoint.value


def interval_index(x, dec: IntervalDecomposition) -> int:
    """
    Index j of the half-open interval I_j containing x

    Args:
        x: Real number (``-INFINITY`` allowed) or a point offering
           ``compare_fraction`` for exact comparison
        dec: Interval decomposition of the same group

    Returns:
        j in 1..p
    """
    if hasattr(x, "compare_fraction") and x.p != dec.p:
        raise DomainError(f"mismatched group index: {x.p} vs {dec.p}")
    if not hasattr(x, "compare_fraction") and x == -INFINITY:
        return 1
    for j in range(1, dec.p + 1):
        _, right = dec.bounds(j)
        if _below(x, right):
            return j
    raise DomainError(f"{x} is not a finite real number")


def verify_group_relations(p: int) -> Dict[str, bool]:
    """T^2 = I and (ST)^p = I, checked exactly"""
    _, T, U = generators(p)
    return {
        "T^2=I": T.power(2).is_identity(),
        "(ST)^p=I": U.power(p).is_identity(),
    }


def verify_endpoint_order(dec: IntervalDecomposition) -> bool:
    """0 = U^p(0) < U^{p-1}(0) < ... < U(0) = infinity, decided exactly"""
    first, last = dec.endpoints[0], dec.endpoints[-1]
    if not first.num.is_zero() or not last.is_infinite:
        return False
    finite = dec.endpoints[:-1]
    for left, right in zip(finite, finite[1:]):
        # left.num/left.den < right.num/right.den
        cross = right.num * left.den - left.num * right.den
        if sign(cross) * sign(left.den) * sign(right.den) <= 0:
            return False
    return True


Pair = Tuple[RingElem, RingElem]


def _bound_pair(endpoint: Optional[Endpoint], p: int) -> Pair:
    """Projective coordinates (num : den) of an interval bound; -infinity is (1 : 0)"""
    if endpoint is None:
        return RingElem.one(p), RingElem.zero(p)
    return endpoint.num, endpoint.den


def _image_pair(M: GroupElem, point: Pair) -> Pair:
    x, y = point
    return M.a * x + M.b * y, M.c * x + M.d * y


def _same_point(first: Pair, second: Pair) -> bool:
    return (first[0] * second[1] - second[0] * first[1]).is_zero()


def verify_interval_shift(dec: IntervalDecomposition, samples_per_interval: int = 20,
                          seed: int = 0, x_max: float = 5.0,
                          shift: Optional[GroupElem] = None) -> Dict[str, object]:
    """
    U maps I_j onto I_{j-1} for j >= 2 and I_1 onto I_p

    Both bounds of every I_j are pushed through ``shift`` (U by default) in
    projective coordinates over Z[lambda_p] and compared exactly with the
    matching bounds of the target interval; interior points are sampled
    numerically.
    """
    p = dec.p
    if shift is None:
        _, _, shift = generators(p)
    if shift.p != p:
        raise DomainError(f"mismatched group index: {shift.p} vs {p}")

    mismatched: List[int] = []
    for j in range(1, p + 1):
        target = p if j == 1 else j - 1
        source = dec.bounds(j)
        image = dec.bounds(target)
        if not all(_same_point(_image_pair(shift, _bound_pair(e, p)), _bound_pair(f, p))
                   for e, f in zip(source, image)):
            mismatched.append(j)

    rng = np.random.default_rng(seed)
    failures: List[Tuple[int, float]] = []
    for j in range(1, p + 1):
        left, right = dec.bounds(j)
        lo = float(left.value) if left is not None else float(right.value) - x_max
        hi = float(right.value) if not right.is_infinite else lo + x_max
        target = p if j == 1 else j - 1
        for x in rng.uniform(lo, hi, size=samples_per_interval):
            image = mobius_apply(shift, float(x))
            if image == INFINITY or interval_index(image, dec) != target:
                failures.append((j, float(x)))

    if mismatched:
        logger.debug(f"interval shift moves the bounds of I_j for j={mismatched} (p={p})")
    if failures:
        logger.debug(f"interval shift failures for p={p}: {failures[:5]}")
    return {"endpoints": not mismatched, "interior": not failures, "failures": failures}
