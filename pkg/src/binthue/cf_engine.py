"""Certified continued-fraction expansion of m**(1/n).

The complete quotient is carried as an exact rational enclosure
``(P1/Q1, P2/Q2)`` seeded from :func:`nth_root_ball`; a partial quotient is
emitted only when both ends share the same floor with nonzero remainders.
When that fails the expansion restarts from scratch at higher precision.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Optional, Sequence

from .errors import PrecisionExhausted, ReducibleInputError
from .numerics import PrecisionPolicy, integer_nth_root, nth_root_ball

try:
    from ._cfcore import expand_quotients as _compiled_expand
except ImportError:  # pragma: no cover - depends on the build
    _compiled_expand = None

HAVE_COMPILED = _compiled_expand is not None

# The compiled loop takes C unsigned longs.
_ULONG_MAX = 2 ** 64 - 1


class Side(enum.Enum):
    BELOW = -1
    EQUAL = 0
    ABOVE = 1


def validate_convergent(m: int, n: int, h: int, k: int) -> Side:
    """Exact position of ``h/k`` relative to ``m**(1/n)``."""
    if k < 1:
        raise ValueError(f"denominator must be positive, got {k}")
    if h <= 0:
        return Side.BELOW
    lhs, rhs = h ** n, m * k ** n
    if lhs < rhs:
        return Side.BELOW
    if lhs > rhs:
        return Side.ABOVE
    return Side.EQUAL


@dataclass(frozen=True)
class Convergent:
    index: int
    partial_quotient: int
    numerator: int
    denominator: int


def convergents_from(quotients: Sequence[int]) -> Iterator[Convergent]:
    h1, h2 = 1, 0  # h_{-1}, h_{-2}
    k1, k2 = 0, 1
    for j, a in enumerate(quotients):
        h1, h2 = a * h1 + h2, h1
        k1, k2 = a * k1 + k2, k1
        yield Convergent(j, a, h1, k1)


@dataclass(frozen=True)
class ExpansionResult:
    """Partial quotients a_0..a_s of m**(1/n), s being the first index with k_s > bound."""

    m: int
    n: int
    bound: int
    quotients: tuple[int, ...]
    digits: int

    @property
    def s(self) -> int:
        return len(self.quotients) - 1

    @cached_property
    def A(self) -> int:
        return max(self.quotients[1:])

    @cached_property
    def convergents(self) -> list[Convergent]:
        return list(convergents_from(self.quotients))

    def iter_convergents(self) -> Iterator[Convergent]:
        """Convergents in order, built lazily (most callers need only a few)."""
        return convergents_from(self.quotients)


def _expand_python(m: int, n: int, digits: int, bound: int) -> tuple[bool, list[int]]:
    ball = nth_root_ball(m, n, digits)
    lo, hi = ball.lower, ball.upper
    P1, Q1 = lo.numerator, lo.denominator
    P2, Q2 = hi.numerator, hi.denominator
    k1, k0 = 0, 1
    out: list[int] = []
    append = out.append
    while True:
        a, R1 = divmod(P1, Q1)
        R2 = P2 - a * Q2
        if not R1 or R2 <= 0 or R2 >= Q2:
            return False, out
        append(a)
        k1, k0 = a * k1 + k0, k1
        if k1 > bound:
            return True, out
        P1, Q1, P2, Q2 = Q1, R1, Q2, R2


def _expand_at(m: int, n: int, digits: int, bound: int, compiled: bool) -> tuple[bool, list[int]]:
    if compiled and m <= _ULONG_MAX and n * digits <= _ULONG_MAX:
        return _compiled_expand(m, n, digits, bound)
    return _expand_python(m, n, digits, bound)


def expand_root(
    m: int,
    n: int,
    C: int,
    policy: Optional[PrecisionPolicy] = None,
    *,
    compiled: Optional[bool] = None,
) -> ExpansionResult:
    """Expand ``m**(1/n)`` until the first convergent denominator exceeding ``C``.

    ``compiled=None`` uses the C loop when it was built; ``False`` forces the
    pure Python loop.  Raises :class:`PrecisionExhausted` if a quotient is
    still ambiguous at ``policy.max_digits``.
    """
    if m < 2:
        raise ValueError(f"expand_root needs m >= 2, got {m}")
    if n < 2:
        raise ValueError(f"expand_root needs n >= 2, got {n}")
    if C < 1:
        raise ValueError(f"expand_root needs C >= 1, got {C}")
    if integer_nth_root(m, n)[1]:
        # m**(1/n) is rational: the expansion terminates and no floor is certifiable.
        raise ReducibleInputError(n, m)
    policy = policy or PrecisionPolicy()
    use_compiled = HAVE_COMPILED if compiled is None else (compiled and HAVE_COMPILED)
    digits = policy.initial_digits
    done = 0
    for digits in policy.schedule():
        ok, quotients = _expand_at(m, n, digits, C, use_compiled)
        if ok:
            return ExpansionResult(m, n, C, tuple(quotients), digits)
        done = len(quotients)
    raise PrecisionExhausted(m, n, done, digits)
