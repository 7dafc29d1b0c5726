from __future__ import annotations

from fractions import Fraction

import pytest

from core.coeff import (
    U_POLY,
    HSeries,
    LaurentPoly,
    arccosh_sq_series,
    div_by_valuation,
    eval_epsilon_base,
    structural_series,
    to_hseries,
)
from core.exceptions import ValuationError


def test_laurent_arithmetic_cancels_to_zero() -> None:
    a = LaurentPoly.monomial(1)
    a_inv = LaurentPoly.monomial(-1)

    assert (a * a_inv) == 1
    assert (a - a).is_zero()
    assert (a + a_inv).coefficient(-1) == 1
    assert a ** -2 == LaurentPoly.monomial(-2)


def test_laurent_inverse_needs_a_monomial() -> None:
    with pytest.raises(ValueError):
        LaurentPoly({1: 1, 0: 1}) ** -1


def test_delta_evaluates_to_minus_two() -> None:
    assert eval_epsilon_base(LaurentPoly.delta()) == -2
    assert eval_epsilon_base(LaurentPoly.monomial(3, 5)) == -5


def test_expansion_in_h() -> None:
    # A = h - 1 and A^-1 = -(1 + h + h^2 + ...)
    assert to_hseries(LaurentPoly.monomial(1), 3).coeffs == (Fraction(-1), Fraction(1), Fraction(0))
    assert to_hseries(LaurentPoly.monomial(-1), 3).coeffs == (Fraction(-1),) * 3


def test_u_has_valuation_one() -> None:
    u = to_hseries(U_POLY, 4)

    assert u.coeffs == (Fraction(0), Fraction(-2), Fraction(-1), Fraction(-1))
    assert u.valuation() == 1
    assert structural_series(4)[0] == u


def test_series_inverse_and_product() -> None:
    one_minus_h = HSeries.of([1, -1], 4)

    inverse = one_minus_h.inverse()

    assert inverse.coeffs == (Fraction(1),) * 4
    assert (one_minus_h * inverse).agrees_with(HSeries.constant(1, 4))


def test_series_without_constant_term_is_not_a_unit() -> None:
    with pytest.raises(ValuationError):
        HSeries.h_power(1, 3).inverse()


def test_product_precision_follows_valuations() -> None:
    product = HSeries.h_power(1, 4) * HSeries.constant(3, 4)

    assert product.prec == 4
    assert product.coefficient(1) == 3
    with pytest.raises(ValueError):
        product.coefficient(4)


def test_division_loses_divisor_valuation() -> None:
    numerator = HSeries.of([0, 0, 1, 1], 4)
    quotient = div_by_valuation(numerator, HSeries.h_power(1, 4))

    assert quotient.prec == 3
    assert quotient.coeffs == (Fraction(0), Fraction(1), Fraction(1))


def test_division_rejects_lower_dividend_valuation() -> None:
    with pytest.raises(ValuationError):
        div_by_valuation(HSeries.constant(1, 3), HSeries.h_power(1, 3))


def test_arccosh_square_coefficients() -> None:
    assert arccosh_sq_series(3) == [Fraction(0), Fraction(2), Fraction(-1, 3), Fraction(4, 45)]


def test_series_json_is_exact() -> None:
    series = HSeries.of([Fraction(1, 3), -2], 3)

    assert series.to_json() == {"prec": 3, "coeffs": ["1/3", "-2", "0"]}
    assert HSeries.from_json(series.to_json()) == series
