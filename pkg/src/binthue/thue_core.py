"""Per-equation solver for x^n - m*y^n = +-1.

Any solution with y above a small threshold satisfies
``|m**(1/n) - x/y| < 1/(2 y**2)`` and is therefore a convergent of m**(1/n).
The convergent denominators worth testing are capped by a bound that depends
on the largest partial quotient met before the denominators pass C.  Small y
are tested directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import gmpy2
from mpmath.ctx_iv import MPIntervalContext
from mpmath.libmp import to_rational

from .cf_engine import ExpansionResult, expand_root
from .errors import ReducibleInputError
from .numerics import PrecisionPolicy, RealBall, floor_of_ball, integer_nth_root

DEFAULT_C = 10 ** 500
PAPER_EXPONENTS = (3, 4, 5, 7, 11, 13, 17, 19, 23, 29)

# Largest m for which small y must be tried directly, as published for the
# sweep up to 10**7.  The computed threshold is used when it is larger.
DIRECT_TEST_TABLE = {
    3: 4,
    5: 10,
    7: 29,
    11: 314,
    13: 1078,
    17: 13489,
    19: 48699,
    23: 652798,
    29: 7960210,
}

# Working precision for the thresholds; they only steer the search region.
BOUND_DIGITS = 30


def check_exponent(n: int) -> None:
    if n != 4 and not (n > 2 and gmpy2.is_prime(n)):
        raise ValueError(f"exponent must be 4 or an odd prime, got {n}")


@dataclass(frozen=True)
class EquationInstance:
    n: int
    m: int
    C: int = DEFAULT_C

    def __post_init__(self):
        check_exponent(self.n)
        if self.m < 2:
            raise ValueError(f"coefficient m must be >= 2, got {self.m}")
        if self.C < 1:
            raise ValueError(f"height bound C must be >= 1, got {self.C}")


@dataclass(frozen=True)
class SolutionTriple:
    """A solution with y >= 1 and x >= 1; ``rhs`` is x^n - m*y^n."""

    n: int
    m: int
    x: int
    y: int
    rhs: int

    def __post_init__(self):
        if self.y < 1 or self.x < 1:
            raise ValueError(f"solutions are stored with x, y >= 1: {self}")
        if verify_exact(self.n, self.m, self.x, self.y) != self.rhs:
            raise ValueError(f"not a solution: {self}")

    @property
    def key(self) -> tuple[int, int, int, int]:
        return (self.m, self.x, self.y, self.rhs)


@dataclass(frozen=True)
class BoundSet:
    c2: RealBall
    c1: RealBall
    small_y_bound: RealBall
    c3: Optional[RealBall] = None


def verify_exact(n: int, m: int, x: int, y: int) -> Optional[int]:
    """x^n - m*y^n if that is +1 or -1, else None."""
    v = x ** n - m * y ** n
    return v if v in (1, -1) else None


def is_irreducible(n: int, m: int) -> bool:
    """Whether x^n - m is irreducible over Q (m >= 2, n = 4 or an odd prime)."""
    check_exponent(n)
    if m < 2:
        raise ValueError(f"coefficient m must be >= 2, got {m}")
    if n == 4:
        # x^4 + 4b^4 would need m < 0, so only squares factor.
        return not integer_nth_root(m, 2)[1]
    return not integer_nth_root(m, n)[1]


def _iv_to_ball(x, digits: int) -> RealBall:
    lo, hi = x._mpi_
    return RealBall.from_interval(Fraction(*to_rational(lo)), Fraction(*to_rational(hi)), digits)


@lru_cache(maxsize=None)
def c2_of(n: int, digits: int = 50) -> RealBall:
    """Product of |Im(zeta^k)| = |sin(2 pi k / n)| over k = 1..n-1, zeta = exp(2 pi i/n)."""
    if n == 4 or n < 3 or not gmpy2.is_prime(n):
        raise ValueError(f"c2 is defined here for odd primes, got {n}")
    ctx = MPIntervalContext()
    ctx.prec = int(digits * 3.33) + 64
    prod = ctx.mpf(1)
    for k in range(1, n):
        prod *= abs(ctx.sin(2 * ctx.pi * k / n))
    return _iv_to_ball(prod, digits)


def _field_constant(n: int) -> RealBall:
    # For n = 4 the two complex conjugates give |x^2 + sqrt(m) y^2| >= sqrt(m) y^2,
    # which is the odd-n argument with the constant 1.
    if n == 4:
        return RealBall.exact(1, 50)
    return c2_of(n)


def c1_of(n: int, m: int, digits: int = BOUND_DIGITS) -> RealBall:
    """m^((n-1)/n) * c2."""
    root = RealBall.exact(m ** (n - 1), digits).nth_root(n)
    return root * _field_constant(n)


def small_y_bound(n: int, m: int, digits: int = BOUND_DIGITS) -> RealBall:
    """(2/c2)^(1/(n-2)) * m^(-(n-1)/(n(n-2))); larger y admit the convergent argument."""
    check_exponent(n)
    ratio = RealBall.exact(2, digits) / _field_constant(n)
    return (ratio ** n / m ** (n - 1)).nth_root(n * (n - 2))


@lru_cache(maxsize=None)
def m_max_for_direct_test(n: int) -> int:
    """floor((2/c2)^(n/(n-1))): the largest m with small_y_bound(n, m) >= 1."""
    check_exponent(n)
    digits = BOUND_DIGITS
    while True:
        ratio = RealBall.exact(2, digits) / _field_constant(n)
        f = floor_of_ball((ratio ** n).nth_root(n - 1))
        if f is not None:
            return f
        digits *= 2


def direct_test_limit(n: int) -> int:
    """m up to this value get the direct small-y test (never below the published range)."""
    return max(m_max_for_direct_test(n), DIRECT_TEST_TABLE.get(n, 0))


def denominator_bound(n: int, c1: RealBall, A: int) -> RealBall:
    """((A+2)/c1)^(1/(n-2)); convergents with k_j at or above it cannot be solutions."""
    if A < 1:
        raise ValueError(f"A must be >= 1, got {A}")
    if c1.lower <= 0:
        raise ValueError(f"c1 must be positive, got {c1!r}")
    return ((A + 2) / c1).nth_root(n - 2)


def compute_bounds(n: int, m: int, A: Optional[int] = None) -> BoundSet:
    c1 = c1_of(n, m)
    c3 = denominator_bound(n, c1, A) if A is not None else None
    return BoundSet(_field_constant(n), c1, small_y_bound(n, m), c3)


@dataclass(frozen=True)
class _ExponentConstants:
    """Per-exponent rational bounds used for the per-m decisions."""

    c2_lower: Fraction
    ratio_power_upper: Fraction  # upper end of (2/c2)^n
    limit: int


@lru_cache(maxsize=None)
def _constants(n: int) -> _ExponentConstants:
    check_exponent(n)
    c2 = _field_constant(n)
    ratio = RealBall.exact(2, BOUND_DIGITS) / c2
    return _ExponentConstants(c2.lower, (ratio ** n).upper, direct_test_limit(n))


def _small_y_top(n: int, m: int) -> int:
    # Largest Y with Y <= upper end of small_y_bound(n, m), i.e.
    # m^(n-1) * Y^(n(n-2)) <= (2/c2)^n, decided exactly.
    consts = _constants(n)
    if m > consts.limit:
        return 0
    lhs = m ** (n - 1)
    e = n * (n - 2)
    y = 0
    while lhs * (y + 1) ** e <= consts.ratio_power_upper:
        y += 1
    # published ranges are tested with at least y = 1
    return max(y, 1)


def _c1_lower(n: int, m: int) -> Fraction:
    g = BOUND_DIGITS
    root, _ = integer_nth_root(m ** (n - 1) * 10 ** (n * g), n)
    return _constants(n).c2_lower * Fraction(root, 10 ** g)


def _direct_candidates(n: int, m: int, C: int):
    for y in range(1, _small_y_top(n, m) + 1):
        base = m * y ** n
        for rhs in (1, -1):
            x, exact = integer_nth_root(base + rhs, n)
            if exact and max(x, y) < C:
                yield x, y, rhs


def solve_with_expansion(
    eq: EquationInstance,
    policy: Optional[PrecisionPolicy] = None,
    *,
    compiled: Optional[bool] = None,
) -> tuple[list[SolutionTriple], ExpansionResult]:
    """As :func:`solve_instance`, also returning the expansion used."""
    n, m, C = eq.n, eq.m, eq.C
    if not is_irreducible(n, m):
        raise ReducibleInputError(n, m)
    found: dict[tuple[int, int], int] = {}
    for x, y, rhs in _direct_candidates(n, m, C):
        found[(x, y)] = rhs

    expansion = expand_root(m, n, C, policy, compiled=compiled)
    # k >= ((A+2)/c1)^(1/(n-2)) is implied by k^(n-2) * c1_lower >= A + 2
    c1_lo = _c1_lower(n, m)
    a_plus_2 = expansion.A + 2
    for conv in expansion.iter_convergents():
        h, k = conv.numerator, conv.denominator
        # the first two are always tried
        if conv.index >= 2 and k ** (n - 2) * c1_lo >= a_plus_2:
            break
        if h < 1 or max(h, k) >= C:
            continue
        rhs = verify_exact(n, m, h, k)
        if rhs is not None:
            found[(h, k)] = rhs

    triples = [SolutionTriple(n, m, x, y, rhs) for (x, y), rhs in found.items()]
    triples.sort(key=lambda t: (t.y, t.x))
    return triples, expansion


def solve_instance(
    eq: EquationInstance,
    policy: Optional[PrecisionPolicy] = None,
    *,
    compiled: Optional[bool] = None,
) -> list[SolutionTriple]:
    """All solutions with 1 <= y and max(x, y) < C, sorted by y.

    Raises :class:`ReducibleInputError` for reducible x^n - m and
    :class:`PrecisionExhausted` when the expansion cannot be certified.
    """
    return solve_with_expansion(eq, policy, compiled=compiled)[0]
