from fractions import Fraction

import pytest
from gmpy2 import mpq, mpz
from hypothesis import given, settings
from hypothesis import strategies as st

from wishart_smin.polynomial import RationalPolynomial, to_fraction

fractions = st.fractions(min_value=-50, max_value=50, max_denominator=30)
coeff_lists = st.lists(fractions, max_size=6)


def test_normalised_storage():
    p = RationalPolynomial([Fraction(1, 2), Fraction(1, 3), 0, 0])
    assert p.degree == 1
    assert p.denominator == 6
    assert p.numerators == (3, 2)
    assert RationalPolynomial([0, 0]).degree == -1


def test_to_fraction_inputs():
    assert to_fraction(3) == 3
    assert to_fraction(mpz(7)) == 7
    assert to_fraction(mpq(2, 6)) == Fraction(1, 3)
    assert to_fraction("5/10") == Fraction(1, 2)
    with pytest.raises(TypeError):
        to_fraction(0.5)


def test_from_integers_negative_denominator():
    p = RationalPolynomial.from_integers([2, 4], -6)
    assert p.coefficients == [Fraction(-1, 3), Fraction(-2, 3)]
    with pytest.raises(ZeroDivisionError):
        RationalPolynomial.from_integers([1], 0)


@settings(max_examples=60, deadline=None)
@given(coeff_lists, coeff_lists, fractions)
def test_ring_operations_match_pointwise(a, b, x):
    p, q = RationalPolynomial(a), RationalPolynomial(b)
    assert (p + q)(x) == p(x) + q(x)
    assert (p - q)(x) == p(x) - q(x)
    assert (p * q)(x) == p(x) * q(x)
    assert (p * 3)(x) == 3 * p(x)


@settings(max_examples=40, deadline=None)
@given(coeff_lists, st.integers(min_value=0, max_value=4), fractions)
def test_power_and_shift(a, k, x):
    p = RationalPolynomial(a)
    assert (p**k)(x) == p(x) ** k
    assert p.shift(k)(x) == p(x) * x**k


@settings(max_examples=40, deadline=None)
@given(coeff_lists)
def test_derivative_term_by_term(a):
    p = RationalPolynomial(a)
    d = p.derivative()
    expected = [k * c for k, c in enumerate(p.coefficients)][1:]
    assert d == RationalPolynomial(expected)


def test_evaluate_float_matches_exact():
    p = RationalPolynomial([1, Fraction(-1, 3), Fraction(1, 7)])
    assert p.evaluate_float(0.5) == pytest.approx(float(p(Fraction(1, 2))), rel=1e-15)


def test_equality_with_scalars():
    assert RationalPolynomial([4]) == 4
    assert RationalPolynomial() == 0
    assert hash(RationalPolynomial([1, 2])) == hash(RationalPolynomial([Fraction(2, 2), 2]))


def test_negative_power_rejected():
    with pytest.raises(ValueError):
        RationalPolynomial([1, 1]) ** -1
