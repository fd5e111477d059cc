from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bcrepair.xrational import INF, ExtendedRational, xmin, xr

fractions = st.fractions(min_value=-1000, max_value=1000, max_denominator=50)


def test_lowest_terms():
    x = xr(6, 8)
    assert (x.numerator, x.denominator) == (3, 4)
    assert str(x) == "3/4"
    assert str(xr(5)) == "5"


def test_infinity_absorbs_and_dominates():
    assert INF + 3 == INF
    assert INF * xr(1, 2) == INF
    assert xr(10 ** 9) < INF
    assert xmin(INF, xr(2), xr(1, 3)) == xr(1, 3)
    assert str(INF) == "inf"


def test_division_by_zero_gives_infinity():
    assert xr(3) / 0 == INF
    assert xr(0) / 0 == INF


@pytest.mark.parametrize("expr", [
    lambda: INF - INF,
    lambda: INF * 0,
    lambda: xr(-1) / 0,
    lambda: -INF,
])
def test_undefined_forms_raise(expr):
    with pytest.raises(ArithmeticError):
        expr()


def test_floats_rejected():
    with pytest.raises(TypeError):
        xr(0.5)


def test_string_parsing():
    assert xr("1/2") == Fraction(1, 2)
    assert xr("0.25") == Fraction(1, 4)
    assert xr("inf").is_infinite


def test_decimal_rendering():
    assert xr(1, 3).to_decimal() == "0.333333333333"
    assert xr(2, 5).to_decimal() == "0.4"
    assert INF.to_decimal() == "inf"


@given(fractions, fractions)
def test_matches_fraction_arithmetic(a, b):
    x, y = xr(a), xr(b)
    assert (x + y).as_fraction() == a + b
    assert (x - y).as_fraction() == a - b
    assert (x * y).as_fraction() == a * b
    assert (x < y) == (a < b)
    if b != 0:
        assert (x / y).as_fraction() == a / b


@given(fractions)
def test_hash_consistent_with_equality(a):
    assert hash(xr(a)) == hash(ExtendedRational(a))
    assert xr(a) == a
