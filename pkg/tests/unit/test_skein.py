from __future__ import annotations

from fractions import Fraction

import pytest

from core.coeff import HSeries, LaurentPoly, to_hseries
from core.exceptions import InsufficientPrecision, SurfaceMismatch
from core.skein import (
    SkeinAlgebra,
    SkeinElement,
    epsilon,
    evaluate_to_disk,
    mul,
    sigma_action,
)
from core.surface import band_core, library_surface, outer_curve

PREC = 4


@pytest.fixture
def torus():
    surface = library_surface("S11")
    return surface, band_core(surface, "a"), band_core(surface, "b")


@pytest.fixture
def sphere():
    surface = library_surface("S04")
    return surface, band_core(surface, "p"), band_core(surface, "q")


def test_linear_structure_drops_zero_terms(torus) -> None:
    surface, a, _ = torus
    x = SkeinElement.of(a, PREC)

    assert (x - x).is_zero()
    assert x.scale(0).is_zero()
    assert x.scale(Fraction(1, 2)).coefficient(a) == HSeries.constant(Fraction(1, 2), PREC)
    assert SkeinElement.unit(surface, PREC).coefficient(a).is_zero()


def test_elements_on_different_surfaces_do_not_mix(torus, sphere) -> None:
    _, a, _ = torus
    _, p, _ = sphere

    with pytest.raises(SurfaceMismatch):
        SkeinElement.of(a, PREC) + SkeinElement.of(p, PREC)
    with pytest.raises(SurfaceMismatch):
        mul(SkeinElement.of(a, PREC), SkeinElement.of(p, PREC))


def test_crossing_cores_resolve_into_two_curves(torus) -> None:
    surface, a, b = torus
    algebra = SkeinAlgebra(surface, PREC)

    table = algebra.product(a, b)

    assert len(table) == 2
    assert sorted(table.values(), key=repr) == sorted(
        [LaurentPoly.monomial(1), LaurentPoly.monomial(-1)], key=repr
    )
    assert all(key.component_count == 1 for key in table)


def test_sigma_of_crossing_cores_has_unit_coefficients(torus) -> None:
    surface, a, b = torus
    x, y = SkeinElement.of(a, PREC), SkeinElement.of(b, PREC)

    bracket = sigma_action(x, y)
    coefficients = [value for _, value in bracket.items()]

    assert bracket.prec == PREC - 1
    assert len(coefficients) == 2
    assert sorted(c.coefficient(0) for c in coefficients) == [-1, 1]
    assert all(c.valuation() == 0 and all(v == 0 for v in c.coeffs[1:]) for c in coefficients)


def test_disjoint_curves_commute(sphere) -> None:
    surface, p, q = sphere
    x, y = SkeinElement.of(p, PREC), SkeinElement.of(q, PREC)

    product = mul(x, y)

    assert product.agrees_with(mul(y, x))
    assert len(list(product.items())) == 1
    assert sigma_action(x, y).is_zero()


def test_product_cache_counts_hits(torus) -> None:
    surface, a, b = torus
    algebra = SkeinAlgebra(surface, PREC)

    algebra.product(a, b)
    algebra.product(a, b)

    assert algebra.stats["misses"] == 1
    assert algebra.stats["hits"] == 1


def test_augmentation_is_multiplicative(torus) -> None:
    surface, a, b = torus
    x, y = SkeinElement.of(a, PREC), SkeinElement.of(b, PREC)

    assert epsilon(x) == -2
    assert epsilon(SkeinElement.unit(surface, PREC)) == 1
    assert epsilon(mul(x, y)) == 4


def test_augmentation_needs_constant_terms(torus) -> None:
    surface, a, _ = torus

    with pytest.raises(InsufficientPrecision):
        epsilon(SkeinElement.zero(surface, 0))


def test_planar_curve_evaluates_to_the_loop_value(sphere) -> None:
    surface, p, _ = sphere

    value = evaluate_to_disk(SkeinElement.of(p, PREC))

    assert value.agrees_with(to_hseries(LaurentPoly.delta(), PREC))
    assert evaluate_to_disk(SkeinElement.unit(surface, PREC)).agrees_with(HSeries.constant(1, PREC))


def test_disk_evaluation_is_multiplicative_on_planar_surfaces(sphere) -> None:
    surface, _, _ = sphere
    x = SkeinElement.of(outer_curve(surface, ["p", "q"]), PREC)
    y = SkeinElement.of(outer_curve(surface, ["q", "r"]), PREC)

    product = evaluate_to_disk(mul(x, y))

    assert product.agrees_with(evaluate_to_disk(x) * evaluate_to_disk(y))
    assert product.agrees_with(to_hseries(LaurentPoly.delta() * LaurentPoly.delta(), PREC))


def test_disk_evaluation_is_linear_on_every_surface(torus) -> None:
    surface, a, b = torus
    x, y = SkeinElement.of(a, PREC), SkeinElement.of(b, PREC)

    total = evaluate_to_disk(x.scale(2) - y)

    assert total.agrees_with(evaluate_to_disk(x).scale(2) - evaluate_to_disk(y))
