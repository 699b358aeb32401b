import math
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from binthue.errors import PrecisionError
from binthue.numerics import (
    MAX_DIGITS,
    PrecisionPolicy,
    RealBall,
    _newton_iroot,
    floor_of_ball,
    integer_nth_root,
    nth_root_ball,
)

rationals = st.fractions(min_value=-10**6, max_value=10**6, max_denominator=10**6)
positive = st.fractions(min_value=Fraction(1, 10**6), max_value=10**6, max_denominator=10**6)
digits = st.integers(min_value=5, max_value=60)

# 4 operations x 2500 examples = 10^4 enclosure checks
ENCLOSURE = settings(max_examples=2500, deadline=None)


def ball_around(q, d, wiggle=Fraction(0)):
    return RealBall.from_interval(q - wiggle, q + wiggle, d)


@ENCLOSURE
@given(rationals, rationals, digits)
def test_add_encloses(a, b, d):
    assert (ball_around(a, d) + ball_around(b, d)).contains(a + b)


@ENCLOSURE
@given(rationals, rationals, digits)
def test_mul_encloses(a, b, d):
    assert (ball_around(a, d) * ball_around(b, d)).contains(a * b)


@ENCLOSURE
@given(rationals, rationals, digits)
def test_div_encloses(a, b, d):
    assume(b != 0)
    assert (ball_around(a, d) / ball_around(b, d)).contains(a / b)
    # an inexact divisor goes through the reciprocal
    wide = ball_around(b, d, abs(b) / 1000)
    assert (ball_around(a, d) / wide).contains(a / b)


@ENCLOSURE
@given(positive, st.integers(min_value=2, max_value=29), digits)
def test_nth_root_encloses(q, k, d):
    r = ball_around(q, d).nth_root(k)
    assert r.lower >= 0
    assert r.lower ** k <= q <= r.upper ** k


def test_operations_round_to_requested_digits():
    third = RealBall.exact(1, 40) / 3
    assert third.contains(Fraction(1, 3))
    assert third.rad <= Fraction(1, 10**39)
    assert third.rad > 0


@settings(max_examples=500, deadline=None)
@given(rationals, st.fractions(min_value=0, max_value=1, max_denominator=10**4))
def test_floor_never_wrong(q, w):
    b = RealBall.from_interval(q - w, q + w, 30)
    f = floor_of_ball(b)
    if f is not None:
        assert f == math.floor(q)
        assert f <= b.lower and b.upper < f + 1


@pytest.mark.parametrize(
    "lo, hi, expected",
    [
        (Fraction("2.9999"), Fraction("3.0001"), None),
        (Fraction("3.2"), Fraction("3.4"), 3),
        (Fraction("-0.5"), Fraction("-0.4"), -1),
    ],
)
def test_floor_examples(lo, hi, expected):
    assert floor_of_ball(RealBall.from_interval(lo, hi, 20)) == expected


@pytest.mark.parametrize(
    "N, n, expected",
    [(27, 3, (3, True)), (28, 3, (3, False)), (47045881, 3, (361, True)), (0, 5, (0, True)), (1, 7, (1, True))],
)
def test_integer_nth_root_examples(N, n, expected):
    assert integer_nth_root(N, n) == expected


def test_integer_nth_root_rejects_negative():
    with pytest.raises(ValueError):
        integer_nth_root(-1, 3)


def test_integer_nth_root_round_trip_grid():
    for n in range(2, 30):
        for r in range(0, 1001):
            assert integer_nth_root(r ** n, n) == (r, True)
            if r >= 1:
                v = r ** n + 1
                root, exact = integer_nth_root(v, n)
                # decide exactness independently instead of assuming
                assert exact == (root ** n == v)
                assert root ** n <= v < (root + 1) ** n


@settings(max_examples=300, deadline=None)
@given(st.integers(min_value=0, max_value=10**400), st.integers(min_value=1, max_value=40))
def test_newton_matches_gmp(N, k):
    assert _newton_iroot(N, k) == integer_nth_root(N, k)[0]


def test_nth_root_ball_examples():
    b = nth_root_ball(8, 3, 50)
    assert b.is_exact and b.mid == 2
    b = nth_root_ball(1, 5, 10)
    assert b.is_exact and b.mid == 1
    b = nth_root_ball(2, 3, 50)
    assert b.lower ** 3 < 2 < b.upper ** 3
    assert b.contains(Fraction("1.25992104989487316476721060727822835057025146470150"))
    assert b.relative_radius() <= Fraction(1, 10**50)


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=1, max_value=10**12), st.integers(min_value=2, max_value=29),
       st.integers(min_value=1, max_value=300))
def test_nth_root_ball_certified(m, n, d):
    b = nth_root_ball(m, n, d)
    assert b.lower ** n <= m <= b.upper ** n
    assert b.relative_radius() <= Fraction(1, 10**d)


def test_nth_root_ball_refuses_huge_precision():
    with pytest.raises(PrecisionError):
        nth_root_ball(2, 3, MAX_DIGITS + 1)


def test_policy_defaults_and_schedule():
    p = PrecisionPolicy()
    assert (p.initial_digits, p.growth_factor, p.max_digits) == (1200, 2, 20000)
    assert list(p.schedule()) == [1200, 2400, 4800, 9600, 19200, 20000]
    assert list(PrecisionPolicy(10, 3, 10).schedule()) == [10]


@pytest.mark.parametrize("kwargs", [{"initial_digits": 0}, {"initial_digits": 500, "max_digits": 100},
                                    {"growth_factor": 1}, {"max_digits": MAX_DIGITS + 1}])
def test_policy_validation(kwargs):
    with pytest.raises(PrecisionError):
        PrecisionPolicy(**kwargs)


def test_policy_from_env():
    p = PrecisionPolicy.from_env({"BINTHUE_DIGITS": "300", "BINTHUE_GROWTH": "3"})
    assert (p.initial_digits, p.growth_factor, p.max_digits) == (300, 3.0, 20000)
    p = PrecisionPolicy.from_env({}, initial_digits=30000)
    assert p.max_digits == 30000


def test_ball_invariants():
    with pytest.raises(ValueError):
        RealBall(Fraction(1), Fraction(-1), 10)
    with pytest.raises(ValueError):
        RealBall(Fraction(1), Fraction(0), 0)
    with pytest.raises(ZeroDivisionError):
        RealBall.from_interval(-1, 1, 10).reciprocal()
