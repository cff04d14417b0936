"""Fixed-point circle arithmetic: exactness and quantization."""

from fractions import Fraction
from math import isqrt

import pytest

from ergolab import fixedpoint
from ergolab.fixedpoint import GOLDEN, MASK, SQRT2M1, U64, CirclePoint, from_any, from_fraction


def test_quarter_turn_exact():
    alpha = from_fraction(Fraction(1, 4))
    assert alpha.frac == U64 // 4
    x = CirclePoint(0).advance(alpha, 3)
    assert x.to_float() == 0.75


def test_advance_zero_is_identity():
    x0 = from_any("0.123456789")
    assert x0.advance(GOLDEN, 0) == x0


def test_advance_composes_exactly():
    # (x + n1*a) + n2*a == x + (n1+n2)*a, bit for bit
    x = from_any("2/7")
    for n1, n2 in [(0, 1), (3, 5), (12345, 67890), (10**9, 10**9)]:
        left = x.advance(GOLDEN, n1).advance(GOLDEN, n2)
        right = x.advance(GOLDEN, n1 + n2)
        assert left.frac == right.frac


def test_golden_against_bigint_oracle():
    # independent derivation: nearest integer to 2^64 * (sqrt(5)-1)/2
    # via a 256-bit integer square root
    bits = 256
    s = isqrt(5 << (2 * bits))  # floor(sqrt(5) * 2^bits)
    expect = round(Fraction(s - (1 << bits), 2 << bits) * U64)
    assert GOLDEN.frac == expect


def test_sqrt2_against_bigint_oracle():
    bits = 256
    s = isqrt(2 << (2 * bits))
    expect = round(Fraction(s - (1 << bits), 1 << bits) * U64)
    assert SQRT2M1.frac == expect


def test_scale_matches_bigint():
    a = GOLDEN
    for k in (0, 1, 7, -3, 10**6):
        assert a.scale(k).frac == (k * a.frac) & MASK


def test_wraparound_stays_in_range():
    x = CirclePoint(U64 - 1)
    y = x.advance(CirclePoint(2), 1)
    assert y.frac == 1


def test_negate():
    assert GOLDEN.negate().frac == (U64 - GOLDEN.frac) % U64
    assert CirclePoint(0).negate().frac == 0


def test_from_any_forms():
    assert from_any(0.5).frac == U64 // 2
    assert from_any("1/3") == from_fraction(Fraction(1, 3))
    assert from_any([1, 3]) == from_fraction(Fraction(1, 3))
    assert from_any({"u64": "42"}).frac == 42
    assert from_any("golden") == GOLDEN
    with pytest.raises(ValueError):
        from_any(object())


def test_json_roundtrip():
    j = GOLDEN.as_json()
    assert from_any({"u64": j["u64"]}) == GOLDEN
    assert j["decimal"].startswith("0.6180339887")


def test_negative_input_wraps():
    assert from_fraction(Fraction(-1, 4)).frac == 3 * (U64 // 4)


def test_frac_out_of_range_rejected():
    with pytest.raises(ValueError):
        CirclePoint(U64)
    with pytest.raises(ValueError):
        CirclePoint(-1)
