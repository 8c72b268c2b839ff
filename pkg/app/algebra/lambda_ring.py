"""
Exact Arithmetic in Z[lambda_p]
===============================

Elements of Z[lambda] with lambda = 2cos(pi/p), stored as integer coefficient
vectors reduced modulo the minimal polynomial of lambda. The real embedding
lambda -> 2cos(pi/p) is evaluated in mpmath interval arithmetic, and signs are
decided exactly: symbolic zero first, then interval refinement with doubling
precision.
"""

import functools
import itertools
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import sympy
from mpmath import iv, mp

from config.config_manager import get_config
from utils.errors import DomainError
from utils.logger import get_logger
from utils.numerics import interval_mid, interval_precision

logger = get_logger("lambda_ring")

# Escalation beyond this many bits is logged as a warning.
SIGN_WARN_BITS = 1024


@functools.lru_cache(maxsize=None)
def minimal_polynomial(p: int) -> Tuple[int, ...]:
    """
    Minimal polynomial of 2cos(pi/p)

    Obtained from the cyclotomic polynomial Phi_{2p}(y) through x = y + 1/y:
    Phi_{2p} is palindromic of degree 2d, so y^{-d} Phi_{2p}(y) is a
    polynomial in x, built from y^i + y^{-i} = V_i(x) with V_0 = 2, V_1 = x,
    V_{i+1} = x V_i - V_{i-1}.

    Args:
        p: Group index, p >= 3

    Returns:
        Integer coefficients, constant term first; the polynomial is monic
        of degree phi(2p)/2
    """
    if p < 3:
        raise DomainError(f"Hecke group index must be >= 3, got {p}")

    y, x = sympy.symbols('y x')
    cyclo = sympy.Poly(sympy.cyclotomic_poly(2 * p, y), y).all_coeffs()[::-1]
    d = (len(cyclo) - 1) // 2

    v_prev = sympy.Poly(2, x)
    v_curr = sympy.Poly(x, x)
    result = sympy.Poly(cyclo[d], x)
    for i in range(1, d + 1):
        result += cyclo[d + i] * v_curr
        v_prev, v_curr = v_curr, v_curr * sympy.Poly(x, x) - v_prev

    coeffs = tuple(int(c) for c in result.all_coeffs()[::-1])
    logger.debug(f"minimal polynomial for p={p}: {coeffs}")
    return coeffs


def degree(p: int) -> int:
    return len(minimal_polynomial(p)) - 1


def _reduce(coeffs: Sequence[int], p: int) -> Tuple[int, ...]:
    """Reduce a coefficient vector modulo the monic minimal polynomial"""
    mu = minimal_polynomial(p)
    n = len(mu) - 1
    work = list(coeffs)
    for top in range(len(work) - 1, n - 1, -1):
        lead = work[top]
        if lead:
            shift = top - n
            for i in range(n):
                work[shift + i] -= lead * mu[i]
            work[top] = 0
    work = work[:n] + [0] * max(0, n - len(work))
    return tuple(work[:n])


IntLike = Union[int, "RingElem"]


class RingElem:
    """
    Immutable element of Z[lambda_p]

    Args:
        coeffs: Integer coefficients of 1, lambda, lambda^2, ...; reduced on construction
        p: Ambient group index
    """

    __slots__ = ('coeffs', 'p', '_hash')

    def __init__(self, coeffs: Sequence[int], p: int):
        if p < 3:
            raise DomainError(f"Hecke group index must be >= 3, got {p}")
        object.__setattr__(self, 'p', p)
        object.__setattr__(self, 'coeffs', _reduce([int(c) for c in coeffs], p))
        object.__setattr__(self, '_hash', hash((p, self.coeffs)))

    def __setattr__(self, name, value):
        raise AttributeError("RingElem is immutable")

    # Constructors

    @classmethod
    def from_int(cls, n: int, p: int) -> "RingElem":
        return cls([n], p)

    @classmethod
    def zero(cls, p: int) -> "RingElem":
        return cls([0], p)

    @classmethod
    def one(cls, p: int) -> "RingElem":
        return cls([1], p)

    @classmethod
    def lam(cls, p: int) -> "RingElem":
        """lambda_p itself"""
        return cls([0, 1], p)

    @classmethod
    def from_json(cls, data: Sequence[int], p: int) -> "RingElem":
        if not isinstance(data, (list, tuple)) or not all(isinstance(c, int) for c in data):
            raise DomainError(f"ring element must be a list of integers, got {data!r}")
        return cls(data, p)

    def to_json(self) -> List[int]:
        return list(self.coeffs)

    # Arithmetic

    def _coerce(self, other: IntLike) -> "RingElem":
        if isinstance(other, RingElem):
            if other.p != self.p:
                raise DomainError(f"mismatched group index: {self.p} vs {other.p}")
            return other
        if isinstance(other, int):
            return RingElem.from_int(other, self.p)
        return NotImplemented

    def __add__(self, other: IntLike) -> "RingElem":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return RingElem([a + b for a, b in zip(self.coeffs, other.coeffs)], self.p)

    __radd__ = __add__

    def __neg__(self) -> "RingElem":
        return RingElem([-a for a in self.coeffs], self.p)

    def __sub__(self, other: IntLike) -> "RingElem":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return RingElem([a - b for a, b in zip(self.coeffs, other.coeffs)], self.p)

    def __rsub__(self, other: IntLike) -> "RingElem":
        return (-self) + other

    def __mul__(self, other: IntLike) -> "RingElem":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        product = [0] * (2 * len(self.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    product[i + j] += a * b
        return RingElem(product, self.p)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "RingElem":
        if n < 0:
            raise DomainError("negative powers are not defined in Z[lambda]")
        result = RingElem.one(self.p)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = RingElem.from_int(other, self.p)
        if not isinstance(other, RingElem):
            return NotImplemented
        return self.p == other.p and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return self._hash

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    # Embedding

    def embed(self, precision: int = 64) -> iv.mpf:
        """
        Certified interval for the image under lambda -> 2cos(pi/p)

        Args:
            precision: Working precision in bits, at least 32

        Returns:
            mpmath interval containing the real value
        """
        if precision < 32:
            raise DomainError(f"embedding precision must be >= 32 bits, got {precision}")
        with interval_precision(precision):
            lam = 2 * iv.cos(iv.pi / self.p)
            acc = iv.mpf(0)
            for c in reversed(self.coeffs):
                acc = acc * lam + c
            return acc

    def sign(self, start_bits: int = 64, max_bits: int = 4096) -> int:
        """
        Exact sign of the embedded value

        Returns:
            -1, 0 or +1
        """
        if self.is_zero():
            return 0
        bits = start_bits
        while True:
            value = self.embed(bits)
            if value > 0:
                return 1
            if value < 0:
                return -1
            bits *= 2
            if bits > SIGN_WARN_BITS:
                logger.warning(f"sign escalation to {bits} bits for {self}")
            if bits > max_bits:
                # Nonzero elements of Z[lambda] have nonzero embedding; this
                # only happens for absurdly large coefficients.
                raise DomainError(f"could not separate {self} from zero at {max_bits} bits")
            logger.debug(f"sign of {self}: raising precision to {bits} bits")

    def to_float(self) -> float:
        return float(self.embed(64).mid)

    def to_mpf(self, precision: int = 64) -> mp.mpf:
        """Midpoint of the embedding as an ordinary mpmath number"""
        return interval_mid(self.embed(precision + 16))

    def __repr__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            elif i == 1:
                terms.append(f"{c}*L")
            else:
                terms.append(f"{c}*L^{i}")
        return f"RingElem({' + '.join(terms) or '0'}; p={self.p})"


def ring_arith(a: RingElem, b: RingElem, op: str) -> RingElem:
    """
    Dispatch one ring operation by name

    Args:
        a: Left operand
        b: Right operand (ignored for ``neg``)
        op: One of ``add``, ``sub``, ``mul``, ``neg``

    Returns:
        Reduced result
    """
    if op != 'neg' and a.p != b.p:
        raise DomainError(f"mismatched group index: {a.p} vs {b.p}")
    if op == 'add':
        return a + b
    if op == 'sub':
        return a - b
    if op == 'mul':
        return a * b
    if op == 'neg':
        return -a
    raise DomainError(f"unknown ring operation {op!r}")


def evaluate_minimal_polynomial(p: int) -> RingElem:
    """mu_p evaluated at lambda inside the ring; the zero element when reduction is correct"""
    lam = RingElem.lam(p)
    acc = RingElem.zero(p)
    for c in reversed(minimal_polynomial(p)):
        acc = acc * lam + c
    return acc


def sign(a: RingElem) -> int:
    """Exact sign of a ring element, using the configured precision limits"""
    return a.sign(get_config('Precision', 'precision_bits'), get_config('Precision', 'max_sign_bits'))


def embed(a: RingElem, precision: int) -> iv.mpf:
    return a.embed(precision)


@functools.lru_cache(maxsize=None)
def conjugates(p: int) -> Tuple[float, ...]:
    """Real embeddings of lambda_p, the roots of its minimal polynomial, ascending"""
    roots = np.roots(minimal_polynomial(p)[::-1])
    return tuple(sorted(float(r.real) for r in roots))


def square_root(a: RingElem) -> Optional[RingElem]:
    """
    Exact square root of ``a`` in Z[lambda_p], or None when ``a`` is not a square

    Z[lambda_p] is the full ring of integers of Q(lambda_p), so this also
    decides whether ``a`` is a square in the field. Candidate coefficients
    come from a Vandermonde solve over the real embeddings, one sign pattern
    at a time, and only an exact ``r * r == a`` is accepted.
    """
    if a.is_zero():
        return a
    lams = np.array(conjugates(a.p))
    values = np.array([float(np.polyval(a.coeffs[::-1], lam)) for lam in lams])
    if values.min() < -1e-9 * np.abs(values).max():
        return None
    vander = np.vander(lams, N=len(lams), increasing=True)
    roots = np.sqrt(np.clip(values, 0.0, None))
    for signs in itertools.product((1.0, -1.0), repeat=len(lams) - 1):
        target = roots * np.array((1.0,) + signs)
        coeffs = np.rint(np.linalg.solve(vander, target))
        candidate = RingElem([int(c) for c in coeffs], a.p)
        if candidate * candidate == a:
            return candidate
    return None
