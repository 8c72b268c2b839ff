"""
Binary Quadratic Forms over Z[lambda_p]
=======================================

lambda-BQFs Q = [A, B, C], their right action Q o M by the Hecke group, the
correspondence between forms, hyperbolic points and hyperbolic matrices, and
enumeration of the simple numbers Z_A of a Hecke symmetric class together
with the closure certificate of the successor map.

A hyperbolic point is kept exactly as the "plus" root (-B + sqrt(D))/(2A) of
its form. The Hecke conjugate is the plus root of the negated form, so every
point has exactly one stored representation and point equality is form
equality.
"""

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Set, Tuple, Union

import mpmath
from mpmath import iv, mp

from algebra.hecke_group import (
    GroupElem, IntervalDecomposition, classify, generators, interval_decomposition,
    interval_index,
)
from algebra.lambda_ring import RingElem, sign, square_root
from config.config_manager import get_config
from utils.errors import DomainError, IncompleteEnumerationError, SymmetryError
from utils.logger import get_logger
from utils.numerics import interval_mid, interval_precision
from utils.performance import profile_operation

logger = get_logger("quadratic_forms")

FormKey = Tuple[int, Tuple[int, ...], Tuple[int, ...], Tuple[int, ...]]


@dataclass(frozen=True)
class QuadraticForm:
    """Q(x, y) = A x^2 + B x y + C y^2 with coefficients in Z[lambda_p]"""
    A: RingElem
    B: RingElem
    C: RingElem
    p: int

    def __post_init__(self):
        if any(e.p != self.p for e in (self.A, self.B, self.C)):
            raise DomainError(f"form coefficients do not all belong to Z[lambda_{self.p}]")

    @classmethod
    def from_ints(cls, coeffs: Sequence[int], p: int) -> "QuadraticForm":
        A, B, C = (RingElem.from_int(c, p) for c in coeffs)
        return cls(A, B, C, p)

    @classmethod
    def parse(cls, entries: Sequence[Union[int, Sequence[int]]], p: int) -> "QuadraticForm":
        """
        Build a form from three entries, each an integer or a coefficient list

        ``[1, [0, 1], -1]`` is the form [1, lambda, -1].
        """
        if not isinstance(entries, (list, tuple)) or len(entries) != 3:
            raise DomainError(f"a form needs exactly three coefficients, got {entries!r}")
        coeffs = []
        for entry in entries:
            if isinstance(entry, bool):
                raise DomainError(f"bad form coefficient {entry!r}")
            if isinstance(entry, int):
                coeffs.append(RingElem.from_int(entry, p))
            else:
                coeffs.append(RingElem.from_json(entry, p))
        return cls(*coeffs, p)

    @classmethod
    def from_json(cls, data: Dict[str, object]) -> "QuadraticForm":
        try:
            p = int(data["p"])
            return cls.parse([data["A"], data["B"], data["C"]], p)
        except (KeyError, TypeError, ValueError) as e:
            raise DomainError(f"malformed form: {e}") from e

    def to_json(self) -> Dict[str, object]:
        return {"p": self.p, "A": self.A.to_json(), "B": self.B.to_json(), "C": self.C.to_json()}

    def discriminant(self) -> RingElem:
        return self.B * self.B - 4 * self.A * self.C

    def key(self) -> FormKey:
        return self.p, self.A.coeffs, self.B.coeffs, self.C.coeffs

    def act(self, M: GroupElem) -> "QuadraticForm":
        """(Q o M)(x, y) = Q(ax + by, cx + dy)"""
        if M.p != self.p:
            raise DomainError(f"mismatched group index: {self.p} vs {M.p}")
        a, b, c, d = M.entries()
        A, B, C = self.A, self.B, self.C
        return QuadraticForm(
            A * a * a + B * a * c + C * c * c,
            2 * A * a * b + B * (a * d + b * c) + 2 * C * c * d,
            A * b * b + B * b * d + C * d * d,
            self.p,
        )

    def negate(self) -> "QuadraticForm":
        return QuadraticForm(-self.A, -self.B, -self.C, self.p)

    def is_simple(self) -> bool:
        """A > 0 > C"""
        return sign(self.A) > 0 and sign(self.C) < 0

    def is_indefinite(self) -> bool:
        return sign(self.discriminant()) > 0

    def has_rational_roots(self) -> bool:
        """Roots in Q(lambda), i.e. the discriminant is a square there"""
        return square_root(self.discriminant()) is not None

    def evaluate(self, z: Union[complex, mpmath.mpc]) -> mpmath.mpc:
        """Q(z, 1) at the current mpmath precision"""
        z = mp.mpc(z)
        A, B, C = (e.to_mpf(mp.prec) for e in (self.A, self.B, self.C))
        return (A * z + B) * z + C

    def __repr__(self) -> str:
        return f"[{self.A}, {self.B}, {self.C}]"


def act(Q: QuadraticForm, M: GroupElem) -> QuadraticForm:
    return Q.act(M)


def negate(Q: QuadraticForm) -> QuadraticForm:
    return Q.negate()


def is_simple(Q: QuadraticForm) -> bool:
    return Q.is_simple()


def discriminant(Q: QuadraticForm) -> RingElem:
    return Q.discriminant()


def canonical_key(Q: QuadraticForm) -> FormKey:
    return Q.key()


def form_from_matrix(M: GroupElem) -> QuadraticForm:
    """
    The form [c, d - a, -b] of a hyperbolic element normalised to positive trace

    Its roots are the fixed points of M.
    """
    if classify(M) != "hyperbolic":
        raise DomainError("form_from_matrix needs a hyperbolic element")
    a, b, c, d = M.entries()
    if sign(a + d) < 0:
        a, b, c, d = -a, -b, -c, -d
    return QuadraticForm(c, d - a, -b, M.p)


class HyperbolicPoint:
    """
    Real quadratic irrational alpha stored as (form, branch)

    Args:
        form: Indefinite form with A != 0 having alpha as a root
        branch: ``"plus"`` for (-B + sqrt(D))/(2A), ``"minus"`` for the Hecke conjugate
    """

    __slots__ = ('form', 'p')

    def __init__(self, form: QuadraticForm, branch: str = "plus"):
        if branch not in ("plus", "minus"):
            raise DomainError(f"branch must be 'plus' or 'minus', got {branch!r}")
        if form.A.is_zero():
            raise DomainError(f"form {form} has a root at infinity")
        if sign(form.discriminant()) <= 0:
            raise DomainError(f"form {form} is not indefinite")
        if branch == "minus":
            form = form.negate()
        object.__setattr__(self, 'form', form)
        object.__setattr__(self, 'p', form.p)

    def __setattr__(self, name, value):
        raise AttributeError("HyperbolicPoint is immutable")

    @property
    def branch(self) -> str:
        return "plus"

    def key(self) -> FormKey:
        return self.form.key()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HyperbolicPoint):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def hecke_conjugate(self) -> "HyperbolicPoint":
        return HyperbolicPoint(self.form, "minus")

    def apply(self, M: GroupElem) -> "HyperbolicPoint":
        """Image M(alpha), carried by the form Q o M^{-1}"""
        return HyperbolicPoint(self.form.act(M.inverse()))

    def root_value(self, precision: int = 64) -> iv.mpf:
        """Certified interval containing alpha"""
        with interval_precision(precision):
            A, B, D = (e.embed(precision) for e in (self.form.A, self.form.B, self.form.discriminant()))
            return (-B + iv.sqrt(D)) / (2 * A)

    def to_mpf(self, precision: Optional[int] = None) -> mpmath.mpf:
        precision = precision or mp.prec
        return interval_mid(self.root_value(precision + 16))

    def to_float(self) -> float:
        return float(self.to_mpf(64))

    def compare_fraction(self, num: RingElem, den: RingElem) -> int:
        """
        Exact sign of alpha - num/den

        With N = B den + 2 A num, alpha - num/den has the sign of
        (sqrt(D) den - N) / (2 A den).
        """
        if den.is_zero():
            raise DomainError("comparison against infinity")
        A, B, D = self.form.A, self.form.B, self.form.discriminant()
        s = sign(den)
        n_signed = (B * den + 2 * A * num) * s
        if sign(n_signed) < 0:
            magnitude_sign = 1
        else:
            magnitude_sign = sign(D * den * den - n_signed * n_signed)
        return magnitude_sign * sign(A)

    def sign(self) -> int:
        return self.compare_fraction(RingElem.zero(self.p), RingElem.one(self.p))

    def is_simple(self) -> bool:
        """alpha > 0 > alpha'"""
        return self.form.is_simple()

    def to_json(self) -> Dict[str, object]:
        return {"form": self.form.to_json(), "value": mp.nstr(self.to_mpf(64), 15)}

    def __repr__(self) -> str:
        return f"HyperbolicPoint({self.form}, ~{mp.nstr(self.to_mpf(53), 10)})"


def root_value(x: HyperbolicPoint, precision: int = 64) -> iv.mpf:
    return x.root_value(precision)


def hecke_conjugate(x: HyperbolicPoint) -> HyperbolicPoint:
    return x.hecke_conjugate()


def apply_group_to_point(M: GroupElem, x: HyperbolicPoint) -> HyperbolicPoint:
    if M.p != x.p:
        raise DomainError(f"mismatched group index: {M.p} vs {x.p}")
    return x.apply(M)


def compare_point(x: HyperbolicPoint, num: RingElem, den: RingElem) -> int:
    return x.compare_fraction(num, den)


def point_key(x: HyperbolicPoint) -> FormKey:
    return x.key()


@dataclass
class SimpleCycle:
    """The simple numbers Z_A of a Hecke symmetric class, with its certificates"""
    p: int
    class_seed: QuadraticForm
    members: List[HyperbolicPoint]
    decomposition: IntervalDecomposition
    interval_indices: Dict[FormKey, int] = field(default_factory=dict)
    successor: Dict[FormKey, FormKey] = field(default_factory=dict)
    certificate: Dict[int, bool] = field(default_factory=dict)
    orbit_count: int = 0
    max_depth: int = 0
    nodes_visited: int = 0

    def index_of(self, x: HyperbolicPoint) -> int:
        return self.interval_indices[x.key()]

    def members_in(self, j: int) -> List[HyperbolicPoint]:
        return [x for x in self.members if self.interval_indices[x.key()] == j]

    def member_keys(self) -> Set[FormKey]:
        return {x.key() for x in self.members}

    def to_json(self) -> Dict[str, object]:
        return {
            "p": self.p,
            "seed": self.class_seed.to_json(),
            "members": [
                {
                    "form": x.form.to_json(),
                    "value": mp.nstr(x.to_mpf(64), 15),
                    "conjugate": mp.nstr(x.hecke_conjugate().to_mpf(64), 15),
                    "interval": self.index_of(x),
                }
                for x in self.members
            ],
            "certificate": {str(j): ok for j, ok in sorted(self.certificate.items())},
            "sigma_bijective": len(set(self.successor.values())) == len(self.members),
            "orbit_count": self.orbit_count,
            "max_depth": self.max_depth,
            "nodes_visited": self.nodes_visited,
        }


def successor_point(x: HyperbolicPoint, j: int, U: GroupElem) -> HyperbolicPoint:
    """sigma(alpha) = U^{j-1}(alpha') for alpha in I_j"""
    return x.hecke_conjugate().apply(U.power(j - 1))


def _orbit_simple_forms(seed: QuadraticForm, max_depth: int, max_nodes: int,
                        is_closed: Optional[Callable[[List[QuadraticForm]], bool]] = None,
                        ) -> Tuple[List[QuadraticForm], int, bool, bool]:
    """
    Breadth-first search over seed o W for words W in S, S^{-1}, T

    Stops early once no new simple form has appeared for p layers and
    ``is_closed`` accepts the simple forms found so far.

    Returns:
        (simple forms, forms visited, whether the node cap was hit, whether -seed was met)
    """
    S, T, _ = generators(seed.p)
    steps = (S, S.inverse(), T)
    seen: Set[FormKey] = {seed.key()}
    simple: List[QuadraticForm] = [seed] if seed.is_simple() else []
    frontier = deque([seed])
    truncated = False
    last_new = 0

    for depth in range(max_depth):
        found_before = len(simple)
        next_frontier = deque()
        for Q in frontier:
            for M in steps:
                image = Q.act(M)
                k = image.key()
                if k in seen:
                    continue
                seen.add(k)
                next_frontier.append(image)
                if image.is_simple():
                    simple.append(image)
                if len(seen) >= max_nodes:
                    truncated = True
                    break
            if truncated:
                break
        logger.debug(f"depth {depth + 1}: frontier {len(next_frontier)}, seen {len(seen)}, simple {len(simple)}")
        if len(simple) > found_before:
            last_new = depth + 1
        frontier = next_frontier
        if truncated or not frontier:
            break
        if is_closed is not None and simple and depth + 1 - last_new >= seed.p and is_closed(simple):
            logger.debug(f"simple forms stable and closed after depth {depth + 1}")
            break

    if truncated:
        logger.warning(f"orbit search stopped at {max_nodes} nodes")
    return simple, len(seen), truncated, seed.negate().key() in seen


def _count_orbits(successor: Dict[FormKey, FormKey]) -> int:
    remaining = set(successor)
    orbits = 0
    while remaining:
        start = remaining.pop()
        orbits += 1
        nxt = successor[start]
        while nxt != start and nxt in remaining:
            remaining.discard(nxt)
            nxt = successor[nxt]
    return orbits


@profile_operation("enumerate_simple_cycle")
def enumerate_simple_cycle(seed: QuadraticForm, max_depth: Optional[int] = None,
                           max_nodes: Optional[int] = None) -> SimpleCycle:
    """
    Enumerate Z_A for the class of ``seed`` and certify closure

    Args:
        seed: Simple indefinite form
        max_depth: Word length bound for the orbit search (default depth_factor * p)
        max_nodes: Cap on distinct forms visited

    Returns:
        SimpleCycle with sorted members, successor map and per-j certificates

    Raises:
        DomainError: seed not simple, not indefinite, or with square discriminant
        SymmetryError: the class of -seed differs from the class of seed
        IncompleteEnumerationError: closure fails at this depth
    """
    p = seed.p
    if max_depth is None:
        max_depth = get_config('Enumeration', 'depth_factor') * p
    if max_nodes is None:
        max_nodes = get_config('Enumeration', 'max_nodes')
    if not seed.is_indefinite():
        raise DomainError(f"seed {seed} does not have positive discriminant")
    if not seed.is_simple():
        raise DomainError(f"seed {seed} is not simple (needs A > 0 > C)")
    if seed.has_rational_roots():
        raise DomainError(f"seed {seed} has roots in Q(lambda); simple numbers must be quadratic irrationals")

    dec = interval_decomposition(p)
    _, _, U = generators(p)

    def closed(found: List[QuadraticForm]) -> bool:
        points = [HyperbolicPoint(Q) for Q in found]
        found_keys = {x.key() for x in points}
        return all(successor_point(x, interval_index(x, dec), U).key() in found_keys for x in points)

    forms, visited, truncated, negated_found = _orbit_simple_forms(seed, max_depth, max_nodes, closed)
    members = [HyperbolicPoint(Q) for Q in forms]

    indices = {x.key(): interval_index(x, dec) for x in members}
    keys = set(indices)
    images = {x.key(): successor_point(x, indices[x.key()], U) for x in members}
    successor = {k: img.key() for k, img in images.items()}

    outside = [img for img in images.values() if img.key() not in keys]
    if outside:
        if len(outside) == len(images) and not negated_found and max_depth >= p and not truncated:
            # sigma maps Z_A into Z_{-A}. Images disjoint from Z_A that map back
            # into it, with -seed never met, identify Z_{-A} as a different class.
            second = {successor_point(y, interval_index(y, dec), U).key() for y in outside}
            if second <= keys:
                raise SymmetryError(f"class of {seed} is not Hecke symmetric: -A != A")
        raise IncompleteEnumerationError(
            f"successor map leaves the enumerated set at depth {max_depth}; raise max_depth",
            max_depth=max_depth,
        )
    if len(set(successor.values())) != len(members):
        raise IncompleteEnumerationError(
            f"successor map is not injective at depth {max_depth}; raise max_depth",
            max_depth=max_depth,
        )

    members.sort(key=lambda x: x.to_mpf(64))
    cycle = SimpleCycle(
        p=p,
        class_seed=seed,
        members=members,
        decomposition=dec,
        interval_indices=indices,
        successor=successor,
        max_depth=max_depth,
        nodes_visited=visited,
    )
    cycle.certificate = {j: verify_mapping_lemma(cycle, j) for j in range(2, p + 1)}
    cycle.orbit_count = _count_orbits(successor)

    if not all(cycle.certificate.values()):
        failed = [j for j, ok in cycle.certificate.items() if not ok]
        raise IncompleteEnumerationError(
            f"interval mapping certificate fails for j={failed} at depth {max_depth}",
            max_depth=max_depth,
        )

    logger.info(f"cycle of {seed}: {len(members)} simple numbers, {cycle.orbit_count} sigma-orbit(s)")
    return cycle


def mapping_lemma_sides(cycle: SimpleCycle, j: int) -> Tuple[Set[FormKey], Set[FormKey]]:
    """
    The two point sets compared for index j

    Returns:
        ({beta' : beta in Z_A cap I_{p-j+2}}, {U^{j-1} alpha : alpha in Z_A cap I_j})
    """
    p = cycle.p
    if not 2 <= j <= p:
        raise DomainError(f"j must lie in 2..{p}, got {j}")
    _, _, U = generators(p)
    Uj = U.power(j - 1)
    lhs = {beta.hecke_conjugate().key() for beta in cycle.members_in(p - j + 2)}
    rhs = {alpha.apply(Uj).key() for alpha in cycle.members_in(j)}
    return lhs, rhs


def verify_mapping_lemma(cycle: SimpleCycle, j: int) -> bool:
    """Exact set equality of both sides for one j in 2..p"""
    lhs, rhs = mapping_lemma_sides(cycle, j)
    if lhs != rhs:
        logger.debug(f"mapping certificate j={j} fails: witness {sorted(lhs ^ rhs)[:1]}")
        return False
    return True


def verify_pole_involution(cycle: SimpleCycle) -> bool:
    """For each alpha in Z_A: (-1/alpha)' and -1/alpha' lie in Z_A"""
    _, T, _ = generators(cycle.p)
    keys = cycle.member_keys()
    for alpha in cycle.members:
        if alpha.apply(T).hecke_conjugate().key() not in keys:
            return False
        if alpha.hecke_conjugate().apply(T).key() not in keys:
            return False
    return True
