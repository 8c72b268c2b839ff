"""
Special Functions
=================

Gamma, Beta and the Gauss hypergeometric evaluations used by the Mellin
formulas: the terminating series 2F1[k, 1-k; c; z], the Euler integral, and
the n-fold integration-by-parts continuation of

    (1/w) 2F1[m, w; w + 1; beta] = int_0^1 y^(w-1) (1 - beta y)^(-m) dy.

All functions evaluate at the ambient ``mpmath.mp`` precision; quadratures add
``Quadrature.guard_bits`` on top of it.
"""

from dataclasses import dataclass
from typing import Iterator, List, Optional, Union

import mpmath
from mpmath import mp

from config.config_manager import get_config
from utils.errors import AccuracyError, DomainError, PoleError
from utils.logger import get_logger
from utils.numerics import precision_tolerance, principal_arg

logger = get_logger("special_functions")

Complex = Union[int, float, complex, mpmath.mpf, mpmath.mpc]


def _nonpositive_integer(x: Complex) -> Optional[int]:
    """-n when x equals the integer -n <= 0 exactly, else None"""
    x = mp.mpc(x)
    if x.imag == 0 and x.real <= 0 and x.real == mp.floor(x.real):
        return int(x.real)
    return None


def gamma(s: Complex) -> mpmath.mpc:
    """
    Complex Gamma function

    Raises:
        PoleError: at s = 0, -1, -2, ... (simple pole, residue (-1)^n / n!)
    """
    n = _nonpositive_integer(s)
    if n is not None:
        residue = mp.mpf(-1) ** (-n) / mp.factorial(-n)
        raise PoleError(f"Gamma has a pole at s = {n}", location=n, residue=residue)
    return mp.gamma(s)


def beta(a: Complex, b: Complex) -> mpmath.mpc:
    """B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b)"""
    pole_a = _nonpositive_integer(a)
    pole_b = _nonpositive_integer(b)
    if (pole_a is not None or pole_b is not None) and _nonpositive_integer(mp.mpc(a) + b) is None:
        raise PoleError(f"Beta has a pole at ({a}, {b})", location=(a, b))
    return mp.beta(a, b)


def hyp2f1_terminating(k: int, c: Complex, z: Complex) -> mpmath.mpc:
    """
    2F1[k, 1-k; c; z] as its finite sum of k terms

    Args:
        k: Positive integer
        c: Lower parameter, not in {0, -1, ..., -(k-2)}
        z: Argument

    Returns:
        Exact finite sum at working precision
    """
    if k < 1:
        raise DomainError(f"terminating series needs k >= 1, got {k}")
    n_c = _nonpositive_integer(c)
    if n_c is not None and -n_c <= k - 2:
        raise PoleError(f"2F1[{k}, {1 - k}; c; z] has a zero denominator at c = {n_c}", location=n_c)

    c = mp.mpc(c)
    z = mp.mpc(z)
    term = mp.mpc(1)
    total = mp.mpc(1)
    for n in range(k - 1):
        term *= (k + n) * (1 - k + n) / ((c + n) * (n + 1)) * z
        total += term
    return total


def _quad(f, points, tol: float, what: str) -> mpmath.mpc:
    """tanh-sinh quadrature with guard bits; raises AccuracyError above ``tol``"""
    with mp.workprec(mp.prec + get_config('Quadrature', 'guard_bits')):
        value, err = mp.quad(f, list(points), error=True, maxdegree=get_config('Quadrature', 'max_degree'))
    if err > tol * max(abs(value), 1):
        raise AccuracyError(f"{what}: quadrature error estimate {mp.nstr(err, 3)}", estimate=float(err))
    return +value


def _binomial_coeffs(p: Complex, x: Complex) -> Iterator[mpmath.mpc]:
    """Taylor coefficients of (1 - x y)^(-p) in y: (p)_j x^j / j!"""
    p, x = mp.mpc(p), mp.mpc(x)
    c = mp.mpc(1)
    j = 0
    while True:
        yield c
        c *= (p + j) * x / (j + 1)
        j += 1


def _cauchy_product(first: Iterator[mpmath.mpc], second: Iterator[mpmath.mpc]) -> Iterator[mpmath.mpc]:
    xs: List[mpmath.mpc] = []
    ys: List[mpmath.mpc] = []
    for x, y in zip(first, second):
        xs.append(x)
        ys.append(y)
        n = len(xs) - 1
        yield mp.fsum(xs[i] * ys[n - i] for i in range(n + 1))


def _endpoint_series(a: mpmath.mpc, coeffs: Iterator[mpmath.mpc], delta: mpmath.mpf, what: str) -> mpmath.mpc:
    """
    int_0^delta y^(a-1) sum_j c_j y^j dy = sum_j c_j delta^(a+j) / (a+j)

    The power series must converge with ratio at most 1/2 on [0, delta].
    """
    total = mp.mpc(0)
    power = mp.power(delta, a)
    quiet = 0
    for j, c in enumerate(coeffs):
        term = c * power / (a + j)
        total += term
        quiet = quiet + 1 if abs(term) <= mp.eps * abs(total) else 0
        if quiet >= 3:
            return total
        if j > 2 * mp.prec + 80:
            raise AccuracyError(f"{what}: endpoint series did not converge", estimate=float(abs(term)))
        power *= delta
    return total


def _series_radius(x: mpmath.mpc) -> mpmath.mpf:
    """Half the convergence radius of a series in x y, capped at 1/2"""
    return mp.mpf(0.5) if abs(x) <= 1 else 1 / (2 * abs(x))


def _pole_breakpoints(lo: mpmath.mpf, hi: mpmath.mpf, pole: mpmath.mpc) -> List[mpmath.mpf]:
    """Break points of [lo, hi] clustering geometrically around the projection of a nearby pole"""
    points = {mp.mpf(lo), mp.mpf(hi)}
    center, width = pole.real, abs(pole.imag)
    if lo < center < hi and width > 0:
        points.add(center)
        for j in range(10):
            for u in (center - width * 2 ** j, center + width * 2 ** j):
                if lo < u < hi:
                    points.add(u)
    return sorted(points)


def hyp2f1_integral(a: Complex, b: Complex, c: Complex, z: Complex, tol: Optional[float] = None) -> mpmath.mpc:
    """
    Euler integral representation

        Gamma(c)/(Gamma(b)Gamma(c-b)) int_0^1 y^(b-1) (1-y)^(c-b-1) (1-yz)^(-a) dy

    valid for Re c > Re b > 0 and |arg(1 - z)| < pi. Both algebraic end
    points are integrated term by term from their power series; quadrature
    only sees the smooth middle piece.
    """
    a, b, c, z = (mp.mpc(v) for v in (a, b, c, z))
    if not (c.real > b.real > 0):
        raise DomainError(f"Euler integral needs Re c > Re b > 0, got b={b}, c={c}")
    w = 1 - z
    if w == 0 or (w.imag == 0 and w.real < 0):
        raise DomainError(f"Euler integral needs |arg(1 - z)| < pi, got z={z}")
    if a == 0 or z == 0:
        return mp.mpc(1)
    tol = precision_tolerance() if tol is None else tol

    # y near 0: y^(b-1) (1-y)^(c-b-1) (1-zy)^(-a)
    lo = _series_radius(z)
    head = _endpoint_series(b, _cauchy_product(_binomial_coeffs(b - c + 1, 1), _binomial_coeffs(a, z)),
                            lo, "hyp2f1_integral")
    # y = 1 - t: t^(c-b-1) (1-t)^(b-1) (1-z)^(-a) (1-zeta t)^(-a)
    zeta = -z / w
    hi = 1 - _series_radius(zeta)
    tail = mp.power(w, -a) * _endpoint_series(
        c - b, _cauchy_product(_binomial_coeffs(1 - b, 1), _binomial_coeffs(a, zeta)),
        1 - hi, "hyp2f1_integral")

    integral = head + tail
    if lo < hi:
        def integrand(y):
            return y ** (b - 1) * (1 - y) ** (c - b - 1) * (1 - y * z) ** (-a)

        integral += _quad(integrand, _pole_breakpoints(lo, hi, 1 / z), tol, "hyp2f1_integral")
    return mp.gamma(c) / (mp.gamma(b) * mp.gamma(c - b)) * integral


def hyp2f1_reference(a: Complex, b: Complex, c: Complex, z: Complex) -> mpmath.mpc:
    """Independent library evaluation used as an oracle"""
    return mp.hyp2f1(a, b, c, z)


def minimal_shift(w: Complex) -> int:
    """Smallest n >= 0 with Re(w) + n > 0"""
    re = mp.mpf(mp.mpc(w).real)
    return max(0, int(mp.floor(-re)) + 1)


def hyp2f1_continued(m: int, s: Complex, beta_arg: Complex, n: Optional[int] = None, *,
                     k: int, tol: Optional[float] = None) -> mpmath.mpc:
    """
    (1/w) 2F1[m, w; w + 1; beta] with w = s - 2k + m, continued to Re s > 2k - m - n

    The integral I(w, m) = int_0^1 y^(w-1) (1 - beta y)^(-m) dy is integrated by
    parts n times:

        I(w, m) = sum_{j<n} (-beta)^j (m)_j / (w)_{j+1} (1 - beta)^(-m-j)
                  + (-beta)^n (m)_n / (w)_n I(w + n, m + n)

    The remaining integral is split at delta = min(1, 1/(2|beta|)): the
    singular piece on [0, delta] is summed from the binomial series of
    (1 - beta y)^(-m-n), the smooth piece on [delta, 1] goes to quadrature.

    Args:
        m: Pole order, 1 <= m <= k
        s: Mellin variable
        beta_arg: Purely imaginary argument -i alpha
        n: Number of integrations by parts; the smallest admissible one when None
        k: Half the weight
        tol: Relative accuracy target of the quadrature piece; derived from the
             working precision when None

    Raises:
        PoleError: at s = 2k - m, 2k - m - 1, ...
    """
    s = mp.mpc(s)
    bt = mp.mpc(beta_arg)
    w = s - 2 * k + m
    n_w = _nonpositive_integer(w)
    if n_w is not None:
        raise PoleError(f"continuation has a simple pole at s = {2 * k - m + n_w}", location=2 * k - m + n_w)
    if bt == 0:
        return 1 / w
    if n is None:
        n = minimal_shift(w)
    if (w + n).real <= 0:
        raise DomainError(f"n = {n} integrations by parts do not reach Re s = {mp.nstr(s.real, 5)}")
    tol = precision_tolerance() if tol is None else tol

    total = mp.mpc(0)
    coeff = mp.mpc(1)  # (-beta)^j (m)_j / (w)_j
    for j in range(n):
        total += coeff / (w + j) * mp.power(1 - bt, -m - j)
        coeff *= -bt * (m + j) / (w + j)

    a, order = w + n, m + n
    delta = min(mp.mpf(1), 1 / (2 * abs(bt)))
    remainder = _endpoint_series(a, _binomial_coeffs(order, bt), delta, "hyp2f1_continued")
    if delta < 1:
        def integrand(y):
            return y ** (a - 1) * (1 - bt * y) ** (-order)

        remainder += _quad(integrand, _pole_breakpoints(delta, 1, 1 / bt), tol, "hyp2f1_continued")
    return total + coeff * remainder


def _positive_integer(x: Complex) -> Optional[int]:
    x = mp.mpc(x)
    if x.imag == 0 and x.real >= 1 and x.real == mp.floor(x.real):
        return int(x.real)
    return None


@dataclass(frozen=True)
class Hyp2F1Request:
    """One hypergeometric evaluation together with the evaluator that should serve it"""
    a: Complex
    b: Complex
    c: Complex
    z: Complex
    mode: str = "integral_rep"

    def evaluate(self) -> mpmath.mpc:
        if self.mode == "terminating":
            n_b = _nonpositive_integer(self.b)
            if n_b is None or mp.mpc(self.a) != 1 - n_b:
                raise DomainError("terminating mode serves 2F1[k, 1-k; c; z] only")
            return hyp2f1_terminating(1 - n_b, self.c, self.z)
        if self.mode == "integral_rep":
            return hyp2f1_integral(self.a, self.b, self.c, self.z)
        if self.mode == "continued":
            # 2F1[m, w; w+1; z] = w * I(w, m)
            m = _positive_integer(self.a)
            if m is None:
                raise DomainError(f"continued mode needs a positive integer a, got {self.a}")
            w = mp.mpc(self.b)
            if mp.mpc(self.c) != w + 1:
                raise DomainError("continued mode needs c = b + 1")
            return w * hyp2f1_continued(m, w - m, self.z, k=0)
        raise DomainError(f"unknown hypergeometric mode {self.mode!r}")


def check_euler_transformation(a: Complex, b: Complex, c: Complex, z: Complex) -> float:
    """
    Relative defect of 2F1[a,b;c;z] = (1-z)^(c-a-b) 2F1[c-a, c-b; c; z]

    Both sides use the Euler integral, so Re c > Re b > 0 is required.
    """
    lhs = hyp2f1_integral(a, b, c, z)
    rhs = mp.power(1 - mp.mpc(z), mp.mpc(c) - a - b) * hyp2f1_integral(mp.mpc(c) - a, mp.mpc(c) - b, c, z)
    return float(abs(lhs - rhs) / abs(lhs))


def check_connection_formula(a: Complex, b: Complex, c: Complex, z: Complex) -> float:
    """
    Relative defect of the 1/z connection formula for |z| > 1, |arg(-z)| < pi

        2F1[a,b;c;z] = G(c)G(b-a)/(G(b)G(c-a)) (-z)^(-a) 2F1[a, a-c+1; a-b+1; 1/z]
                     + G(c)G(a-b)/(G(a)G(c-b)) (-z)^(-b) 2F1[b, b-c+1; b-a+1; 1/z]

    The left side uses the Euler integral; the right side uses convergent series at 1/z.
    """
    a, b, c, z = (mp.mpc(v) for v in (a, b, c, z))
    if abs(z) <= 1:
        raise DomainError("connection formula check needs |z| > 1")
    if abs(principal_arg(-z)) >= mp.pi:
        raise DomainError("connection formula check needs |arg(-z)| < pi")
    lhs = hyp2f1_integral(a, b, c, z)
    g = mp.gamma
    term_a = g(c) * g(b - a) / (g(b) * g(c - a)) * mp.power(-z, -a) * mp.hyp2f1(a, a - c + 1, a - b + 1, 1 / z)
    term_b = g(c) * g(a - b) / (g(a) * g(c - b)) * mp.power(-z, -b) * mp.hyp2f1(b, b - c + 1, b - a + 1, 1 / z)
    return float(abs(lhs - (term_a + term_b)) / abs(lhs))


def check_gamma_reflection(s: Complex) -> float:
    """|Gamma(s) Gamma(1-s) sin(pi s) / pi - 1|"""
    s = mp.mpc(s)
    return float(abs(gamma(s) * gamma(1 - s) * mp.sin(mp.pi * s) / mp.pi - 1))
