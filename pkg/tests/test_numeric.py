import math
from decimal import Decimal, getcontext
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from tce_dynamics.numeric import (
    PHI,
    FloorRefinementError,
    GoldenRational,
    golden,
    gr_floor,
    gr_sign,
    gr_to_float,
    parse_golden,
)

getcontext().prec = 80
SQRT5 = Decimal(5).sqrt()
PHI_DEC = (SQRT5 - 1) / 2


def dec(x: GoldenRational) -> Decimal:
    """80-digit value of a + b*phi, independent of the library's enclosures."""
    a, b = x.a, x.b
    return Decimal(a.numerator) / Decimal(a.denominator) + Decimal(b.numerator) / Decimal(b.denominator) * PHI_DEC


fractions = st.fractions(min_value=-100, max_value=100, max_denominator=60)
goldens = st.builds(GoldenRational, fractions, fractions)


def test_phi_squared():
    assert PHI * PHI == GoldenRational(1, -1)


def test_phi_times_one_plus_phi():
    assert (1 + PHI) * PHI == 1
    assert (1 + PHI).inverse() == PHI


def test_phi_cubed():
    x = PHI ** 3
    assert x == GoldenRational(-1, 2)
    assert abs(float(x) - 0.2360679774997897) < 1e-15


def test_canonical_fractions():
    x = GoldenRational(Fraction(2, -4), Fraction(6, 8))
    assert x.a == Fraction(-1, 2) and x.a.denominator == 2
    assert x.b == Fraction(3, 4)


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        PHI / GoldenRational(0, 0)
    with pytest.raises(ZeroDivisionError):
        GoldenRational(0, 0).inverse()


@pytest.mark.parametrize("a,b,expected", [(1, -1, 1), (-1, 2, 1), (0, 0, 0), (0, -1, -1), (-2, 3, -1)])
def test_sign_examples(a, b, expected):
    assert gr_sign(GoldenRational(a, b)) == expected


@pytest.mark.parametrize("x,expected", [(PHI, 0), (1 + PHI, 1), (3 * PHI, 1), (-PHI, -1), (GoldenRational(7, 0), 7)])
def test_floor_examples(x, expected):
    assert gr_floor(x) == expected


def test_to_float_examples():
    assert gr_to_float(PHI) == 0.6180339887498949
    assert gr_to_float(GoldenRational(0, 0)) == 0.0
    lam2 = (2 + PHI).inverse()
    assert lam2 == PHI ** 2 == 1 - PHI
    assert gr_to_float(lam2) == 0.38196601125010515


def test_floor_respects_cap(monkeypatch):
    import tce_dynamics.numeric as numeric
    # a 2**100 coefficient makes the first 64-bit enclosure wider than 1
    x = GoldenRational(0, 2 ** 100)
    assert gr_floor(x) == math.floor(Decimal(2 ** 100) * PHI_DEC)
    monkeypatch.setattr(numeric, "FLOOR_MAX_ROUNDS", 1)
    with pytest.raises(FloorRefinementError):
        gr_floor(x)


@pytest.mark.parametrize("text,value", [
    ("1/2 + 3/4*phi", GoldenRational(Fraction(1, 2), Fraction(3, 4))),
    ("1 - phi", 1 - PHI),
    ("-phi", -PHI),
    ("2/5", GoldenRational(Fraction(2, 5), 0)),
    ("7", GoldenRational(7, 0)),
])
def test_parse(text, value):
    assert parse_golden(text) == value


@pytest.mark.parametrize("bad", ["", "phi phi", "1 +", "x", "1..2"])
def test_parse_rejects(bad):
    with pytest.raises(ValueError):
        parse_golden(bad)


@given(goldens)
def test_text_round_trip(x):
    assert parse_golden(str(x)) == x
    assert golden(str(x)) == x


@settings(max_examples=2000, deadline=None)
@given(goldens, goldens, goldens)
def test_field_laws(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x + y == y + x
    assert x * y == y * x
    assert x * (y + z) == x * y + x * z
    assert x - x == 0
    if x != 0:
        assert x * x.inverse() == 1
        assert (y / x) * x == y


@given(goldens, goldens)
def test_sign_multiplicative(x, y):
    assert gr_sign(x * y) == gr_sign(x) * gr_sign(y)


@given(goldens)
def test_sign_matches_decimal(x):
    v = dec(x)
    assert gr_sign(x) == (v > 0) - (v < 0)


@given(goldens)
def test_floor_brackets(x):
    f = gr_floor(x)
    assert f <= x < f + 1
    assert f == math.floor(dec(x))


@given(goldens)
def test_to_float_within_an_ulp(x):
    f = gr_to_float(x)
    exact = dec(x)
    assert abs(Decimal(f) - exact) <= Decimal(math.ulp(f)) / 2 * Decimal("1.0000001")


@given(goldens, goldens)
def test_norm_multiplicative_and_conjugate(x, y):
    assert (x * y).norm() == x.norm() * y.norm()
    assert (x * y).conjugate() == x.conjugate() * y.conjugate()
    assert x * x.conjugate() == x.norm()


@given(goldens, st.integers(min_value=-6, max_value=6))
def test_integer_powers(x, n):
    if x == 0 and n < 0:
        return
    expected = GoldenRational(1, 0)
    base = x if n >= 0 else x.inverse()
    for _ in range(abs(n)):
        expected = expected * base
    assert x ** n == expected


@given(goldens, goldens)
def test_ordering_consistent(x, y):
    assert (x < y) == (dec(x) < dec(y))
    assert (x == y) == (x.a == y.a and x.b == y.b)


def test_mixing_with_float_demotes():
    v = PHI + 0.5
    assert isinstance(v, float)
    assert abs(v - 1.1180339887498949) < 1e-15
    assert PHI < 0.6180339887498950
    assert PHI > 0.6180339887498948


def test_hash_matches_fraction_for_rationals():
    assert hash(GoldenRational(Fraction(3, 7), 0)) == hash(Fraction(3, 7))
    assert GoldenRational(3, 0) == 3
