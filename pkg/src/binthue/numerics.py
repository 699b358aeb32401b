"""Ball arithmetic, certified n-th roots and exact integer roots.

A :class:`RealBall` is a midpoint-radius enclosure with exact rational
midpoint and radius.  Every operation rounds outward onto a decimal grid of
``digits`` significant digits, so the true value is always inside.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Union

import gmpy2

from .errors import PrecisionError

# Beyond this the integers involved stop being practical to build.
MAX_DIGITS = 1_000_000

_LOG10_2 = math.log10(2)

Number = Union[int, Fraction, "RealBall"]


def integer_nth_root(N: int, n: int) -> tuple[int, bool]:
    """Return ``(floor(N**(1/n)), exact)`` where exact means ``r**n == N``."""
    if N < 0:
        raise ValueError(f"integer_nth_root needs N >= 0, got {N}")
    if n < 1:
        raise ValueError(f"integer_nth_root needs n >= 1, got {n}")
    r, exact = gmpy2.iroot(N, n)
    return int(r), bool(exact)


def _newton_iroot(N: int, k: int) -> int:
    # Precision-doubling Newton: a half-length root of N >> (k*t) gives an
    # overestimate, from which the integer iteration descends to the floor.
    if N < 2 or k == 1:
        return N
    bits = N.bit_length()
    if bits // k <= 40:
        x = int(math.exp(math.log(N) / k)) + 2
        while x ** k > N:
            x -= 1
        while (x + 1) ** k <= N:
            x += 1
        return x
    t = (bits // k) // 2
    x = (_newton_iroot(N >> (k * t), k) + 1) << t
    while True:
        y = ((k - 1) * x + N // x ** (k - 1)) // k
        if y >= x:
            return x
        x = y


def _log10_estimate(q: Fraction) -> int:
    """An integer within 1 of floor(log10(|q|)) for q != 0."""
    num, den = abs(q.numerator), q.denominator
    return math.floor((num.bit_length() - den.bit_length()) * _LOG10_2)


def _check_digits(digits: int) -> None:
    if digits < 1:
        raise PrecisionError(f"digits must be >= 1, got {digits}")
    if digits > MAX_DIGITS:
        raise PrecisionError(f"{digits} digits requested; the limit is {MAX_DIGITS}")


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


@dataclass(frozen=True)
class RealBall:
    """The closed interval ``[mid - rad, mid + rad]``."""

    mid: Fraction
    rad: Fraction
    digits: int

    def __post_init__(self):
        if self.rad < 0:
            raise ValueError("ball radius must be nonnegative")
        if self.digits < 1:
            raise ValueError("ball digits must be >= 1")

    # construction

    @classmethod
    def exact(cls, value: Union[int, Fraction], digits: int) -> "RealBall":
        return cls(Fraction(value), Fraction(0), digits)

    @classmethod
    def from_interval(cls, lo, hi, digits: int) -> "RealBall":
        """Smallest grid ball containing ``[lo, hi]``."""
        lo, hi = Fraction(lo), Fraction(hi)
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        return cls._rounded((lo + hi) / 2, (hi - lo) / 2, digits)

    @classmethod
    def _rounded(cls, mid: Fraction, rad: Fraction, digits: int) -> "RealBall":
        mag = max(abs(mid), rad)
        if mag == 0:
            return cls(Fraction(0), Fraction(0), digits)
        e = _log10_estimate(mag) - digits - 1
        if e < 0:
            scale = 10 ** (-e)
            if (scale % mid.denominator == 0 and rad == 0):
                return cls(mid, rad, digits)
            n = round(mid * scale)
            new_mid = Fraction(n, scale)
            slack = abs(mid - new_mid) + rad
            new_rad = Fraction(_ceil_div(slack.numerator * scale, slack.denominator), scale)
        else:
            unit = 10 ** e
            if rad == 0 and mid.denominator == 1 and mid.numerator % unit == 0:
                return cls(mid, rad, digits)
            new_mid = Fraction(round(mid / unit) * unit)
            slack = abs(mid - new_mid) + rad
            new_rad = Fraction(_ceil_div(slack.numerator, slack.denominator * unit) * unit)
        return cls(new_mid, new_rad, digits)

    def _coerce(self, other: Number) -> "RealBall":
        if isinstance(other, RealBall):
            return other
        if isinstance(other, (int, Fraction)):
            return RealBall.exact(other, self.digits)
        return NotImplemented

    # views

    @property
    def lower(self) -> Fraction:
        return self.mid - self.rad

    @property
    def upper(self) -> Fraction:
        return self.mid + self.rad

    @property
    def is_exact(self) -> bool:
        return self.rad == 0

    def contains(self, value) -> bool:
        return self.lower <= Fraction(value) <= self.upper

    def relative_radius(self) -> Fraction:
        if self.mid == 0:
            raise ZeroDivisionError("relative radius of a ball centred at 0")
        return self.rad / abs(self.mid)

    def __float__(self) -> float:
        return float(self.mid)

    def __repr__(self) -> str:
        return f"RealBall({float(self.mid)!r} +/- {float(self.rad):.3g}, digits={self.digits})"

    # arithmetic

    def __neg__(self) -> "RealBall":
        return RealBall(-self.mid, self.rad, self.digits)

    def __add__(self, other: Number) -> "RealBall":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        digits = min(self.digits, other.digits)
        return RealBall._rounded(self.mid + other.mid, self.rad + other.rad, digits)

    __radd__ = __add__

    def __sub__(self, other: Number) -> "RealBall":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other: Number) -> "RealBall":
        return (-self) + other

    def __mul__(self, other: Number) -> "RealBall":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        digits = min(self.digits, other.digits)
        a, b = self, other
        rad = abs(a.mid) * b.rad + abs(b.mid) * a.rad + a.rad * b.rad
        return RealBall._rounded(a.mid * b.mid, rad, digits)

    __rmul__ = __mul__

    def reciprocal(self) -> "RealBall":
        lo, hi = self.lower, self.upper
        if lo <= 0 <= hi:
            raise ZeroDivisionError(f"reciprocal of a ball containing 0: {self!r}")
        return RealBall.from_interval(1 / hi, 1 / lo, self.digits)

    def __truediv__(self, other: Number) -> "RealBall":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.is_exact:
            if other.mid == 0:
                raise ZeroDivisionError("ball division by exact zero")
            q = abs(other.mid)
            return RealBall._rounded(self.mid / other.mid, self.rad / q,
                                     min(self.digits, other.digits))
        return self * other.reciprocal()

    def __rtruediv__(self, other: Number) -> "RealBall":
        return self._coerce(other) / self

    def __pow__(self, e: int) -> "RealBall":
        if not isinstance(e, int) or e < 0:
            raise ValueError("ball powers take nonnegative integer exponents")
        result = RealBall.exact(1, self.digits)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def nth_root(self, k: int) -> "RealBall":
        """Enclosure of the real k-th root of a nonnegative ball."""
        if k < 1:
            raise ValueError(f"root index must be >= 1, got {k}")
        if k == 1:
            return self
        lo, hi = self.lower, self.upper
        if lo < 0:
            raise ValueError(f"k-th root of a ball reaching below 0: {self!r}")
        if hi == 0:
            return RealBall.exact(0, self.digits)
        g = max(0, self.digits + 2 - _log10_estimate(hi) // k)
        scale = 10 ** g
        shift = 10 ** (k * g)
        r_lo, _ = integer_nth_root(lo.numerator * shift // lo.denominator, k)
        r_hi, exact = integer_nth_root(_ceil_div(hi.numerator * shift, hi.denominator), k)
        if not exact:
            r_hi += 1
        return RealBall.from_interval(Fraction(r_lo, scale), Fraction(r_hi, scale), self.digits)


def floor_of_ball(b: RealBall) -> Optional[int]:
    """The common floor of every point of ``b``, or ``None`` when it is not unique."""
    f = math.floor(b.lower)
    if b.upper < f + 1:
        return f
    return None


def nth_root_ball(m: int, n: int, digits: int) -> RealBall:
    """Certified enclosure of the real root ``m**(1/n)``.

    The midpoint comes from integer Newton iteration on ``m * 10**(n*digits)``;
    the radius is certified by an exact bracketing check on the result.
    """
    if m < 1:
        raise ValueError(f"nth_root_ball needs m >= 1, got {m}")
    if n < 2:
        raise ValueError(f"nth_root_ball needs n >= 2, got {n}")
    _check_digits(digits)
    N = m * 10 ** (n * digits)
    r = _newton_iroot(N, n)
    lo_pow, hi_pow = r ** n, (r + 1) ** n
    if not lo_pow <= N < hi_pow:
        raise ArithmeticError(f"root bracketing failed for {m}^(1/{n})")
    scale = 10 ** digits
    if lo_pow == N:
        return RealBall(Fraction(r, scale), Fraction(0), digits)
    return RealBall(Fraction(2 * r + 1, 2 * scale), Fraction(1, 2 * scale), digits)


@dataclass(frozen=True)
class PrecisionPolicy:
    """How many decimal digits to try, and how far to escalate on ambiguity."""

    initial_digits: int = 1200
    growth_factor: float = 2
    max_digits: int = 20000

    def __post_init__(self):
        if self.initial_digits < 1:
            raise PrecisionError("initial_digits must be >= 1")
        if self.initial_digits > self.max_digits:
            raise PrecisionError(
                f"initial_digits {self.initial_digits} exceeds max_digits {self.max_digits}"
            )
        if self.max_digits > MAX_DIGITS:
            raise PrecisionError(f"max_digits is limited to {MAX_DIGITS}")
        if not self.growth_factor > 1:
            raise PrecisionError("growth_factor must be > 1")

    def schedule(self) -> Iterator[int]:
        """Digit counts to try in order; the cap itself is always the last one."""
        d = self.initial_digits
        while d < self.max_digits:
            yield d
            d = max(d + 1, math.ceil(d * self.growth_factor))
        yield self.max_digits

    @classmethod
    def from_env(cls, environ=None, **overrides) -> "PrecisionPolicy":
        """Defaults, then ``BINTHUE_DIGITS`` / ``BINTHUE_MAX_DIGITS`` /
        ``BINTHUE_GROWTH``, then explicit keyword overrides."""
        env = os.environ if environ is None else environ
        kwargs = {}
        if "BINTHUE_DIGITS" in env:
            kwargs["initial_digits"] = int(env["BINTHUE_DIGITS"])
        if "BINTHUE_MAX_DIGITS" in env:
            kwargs["max_digits"] = int(env["BINTHUE_MAX_DIGITS"])
        if "BINTHUE_GROWTH" in env:
            kwargs["growth_factor"] = float(env["BINTHUE_GROWTH"])
        kwargs.update({k: v for k, v in overrides.items() if v is not None})
        if "initial_digits" in kwargs and "max_digits" not in kwargs:
            kwargs["max_digits"] = max(cls.max_digits, kwargs["initial_digits"])
        return cls(**kwargs)
