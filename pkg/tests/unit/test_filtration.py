from __future__ import annotations

from fractions import Fraction

import pytest

from core.coeff import HSeries
from core.config.models import CertificateConfig
from core.exceptions import DegreeError, NotInF3
from core.filtration import (
    Certificate,
    SymHH,
    Wedge3,
    degree_lower_bound,
    expand_aug_coordinates,
    graded_bracket,
    intersection_form,
    lambda_eval,
    lambda_term,
    membership_certificate,
    proj_F2_mod_F3,
    rho_eval,
    tau_extract,
)
from core.skein import SkeinElement, bracket_class, epsilon
from core.surface import band_core, library_surface
from core.surface.words import HClass, group_ring_product, minus_one, parse_letters

PREC = 4
NARROW = CertificateConfig(twist_depth=0)


@pytest.fixture
def torus():
    surface = library_surface("S11")
    return surface, band_core(surface, "a"), band_core(surface, "b")


def _shifted(curve, surface):
    return SkeinElement.of(curve, PREC) + SkeinElement.scalar(surface, 2, PREC)


def test_wedge_is_alternating() -> None:
    assert Wedge3.from_mapping({("b", "a", "c"): 1}) == Wedge3.from_mapping({("a", "b", "c"): -1})
    assert Wedge3.from_mapping({("b", "c", "a"): 1}) == Wedge3.from_mapping({("a", "b", "c"): 1})
    assert Wedge3.from_mapping({("a", "a", "b"): 5}).is_zero()


def test_wedge_of_classes() -> None:
    a = HClass.from_mapping({"a": 1})
    b = HClass.from_mapping({"b": 1})
    ab = HClass.from_mapping({"a": 1, "b": 1})

    assert Wedge3.wedge(a, b, HClass.from_mapping({"c": 2})).as_dict() == {("a", "b", "c"): Fraction(2)}
    assert Wedge3.wedge(a, b, ab).is_zero()
    assert Wedge3.basis(["c", "a", "b", "d"])[0] == ("a", "b", "c")


def test_symmetric_square_is_symmetric() -> None:
    a = HClass.from_mapping({"a": 1, "b": -1})
    b = HClass.from_mapping({"b": 2})

    assert SymHH.product(a, b) == SymHH.product(b, a)
    assert SymHH.product(a, b).as_dict() == {("a", "b"): Fraction(2), ("b", "b"): Fraction(-2)}
    assert (SymHH.product(a, b) - SymHH.product(b, a)).is_zero()


def test_intersection_form_is_antisymmetric(torus) -> None:
    surface, _, _ = torus
    form = intersection_form(surface)

    assert form[("a", "a")] == 0
    assert form[("a", "b")] == -form[("b", "a")]
    assert abs(form[("a", "b")]) == 1


def test_shifted_curve_expands_to_one_monomial(torus) -> None:
    surface, a, _ = torus

    expansion = expand_aug_coordinates(_shifted(a, surface))

    assert [m.degree for m in expansion.terms] == [2]
    assert expansion.to_element().agrees_with(_shifted(a, surface))


def test_degree_bounds(torus) -> None:
    surface, a, _ = torus

    assert degree_lower_bound(SkeinElement.of(a, PREC)) == 0
    assert degree_lower_bound(_shifted(a, surface)) == 2
    assert degree_lower_bound(SkeinElement.zero(surface, PREC)) == 2 * PREC


def test_projection_of_a_shifted_core(torus) -> None:
    surface, a, _ = torus

    assert proj_F2_mod_F3(_shifted(a, surface)) == SymHH.from_mapping({("a", "a"): Fraction(1, 2)})


def test_projection_of_h_is_the_scalar_class(torus) -> None:
    surface, _, _ = torus
    h = SkeinElement.scalar(surface, HSeries.h_power(1, PREC), PREC)

    assert proj_F2_mod_F3(h) == SymHH(scalar=Fraction(1))


def test_projection_needs_augmentation_kernel(torus) -> None:
    _, a, _ = torus

    with pytest.raises(DegreeError):
        proj_F2_mod_F3(SkeinElement.of(a, PREC))


def test_graded_bracket_pairs_crossing_cores(torus) -> None:
    surface, _, _ = torus
    aa = SymHH.from_mapping({("a", "a"): 1})
    bb = SymHH.from_mapping({("b", "b"): 1})

    bracket = graded_bracket(surface, aa, bb)

    assert list(bracket.as_dict()) == [("a", "b")]
    assert graded_bracket(surface, aa, aa).is_zero()


def test_lambda_and_rho_land_in_the_augmentation_kernel() -> None:
    surface = library_surface("S04")

    assert epsilon(lambda_term(surface, ("p", "q", "r"), 3)) == 0
    assert epsilon(rho_eval(SymHH.from_mapping({("p", "q"): 1}), surface, 3)) == 0


def test_lambda_eval_is_linear() -> None:
    surface = library_surface("S04")
    single = lambda_term(surface, ("p", "q", "r"), 3)

    assert lambda_eval(Wedge3.from_mapping({("p", "q", "r"): 2}), surface, 3).agrees_with(single.scale(2))
    assert lambda_eval(Wedge3.from_mapping({("q", "p", "r"): 1}), surface, 3).agrees_with(-single)
    assert lambda_eval(Wedge3(), surface, 3).is_zero()


def test_rho_of_the_scalar_class_is_h(torus) -> None:
    surface, _, _ = torus

    value = rho_eval(SymHH(scalar=Fraction(1)), surface, PREC)

    assert value.agrees_with(SkeinElement.scalar(surface, HSeries.h_power(1, PREC), PREC))


def test_rho_is_a_section_of_the_projection(torus) -> None:
    surface, _, _ = torus
    square = SymHH.from_mapping({("a", "a"): 1})

    assert proj_F2_mod_F3(rho_eval(square, surface, PREC)) == square


def test_tau_of_a_deep_element_is_zero(torus) -> None:
    surface, _, _ = torus
    h_squared = SkeinElement.scalar(surface, HSeries.h_power(2, PREC), PREC)

    assert tau_extract(h_squared, NARROW).is_zero()


def test_tau_rejects_elements_outside_f3(torus) -> None:
    surface, a, _ = torus

    with pytest.raises(NotInF3):
        tau_extract(_shifted(a, surface), NARROW)
    with pytest.raises(NotInF3):
        tau_extract(SkeinElement.of(a, PREC), NARROW)


def test_membership_certificates(torus) -> None:
    surface, a, _ = torus
    h_squared = SkeinElement.scalar(surface, HSeries.h_power(2, PREC), PREC)

    found = membership_certificate(h_squared, 2, NARROW)

    assert isinstance(found, Certificate)
    assert found.power == 2
    assert found.to_json()["terms"]
    assert not membership_certificate(_shifted(a, surface), 2, NARROW)
    assert isinstance(membership_certificate(SkeinElement.zero(surface, PREC), 3, NARROW), Certificate)


def _minus(*words: str) -> dict:
    """(w1 - 1)(w2 - 1)... in the group ring."""

    return group_ring_product(minus_one(parse_letters(w)) for w in words)


def _combine(*parts: tuple) -> dict:
    total: dict = {}
    for ring, coeff in parts:
        for letters, value in ring.items():
            total[letters] = total.get(letters, Fraction(0)) + value * coeff
    return {letters: value for letters, value in total.items() if value}


BRACKET_IDENTITIES = {
    "reordering the first two factors": _combine((_minus("p", "q", "r"), 1), (_minus("q", "p", "r"), 1)),
    "four factors vanish": _minus("p", "q", "r", "p"),
    "repeated factor vanishes": _minus("p", "q", "q"),
    "commutator times c": _combine(
        ({parse_letters("p q p^-1 q^-1 r"): Fraction(1), parse_letters("r"): Fraction(-1)}, 1),
        (_minus("p", "q", "r"), -2),
    ),
    "square of a - 1": _combine((_minus("p", "p"), 1), ({parse_letters("p"): Fraction(1)}, -2)),
}


@pytest.mark.slow
@pytest.mark.parametrize("name", sorted(BRACKET_IDENTITIES))
def test_bracket_class_identities_hold_modulo_the_square(name: str) -> None:
    surface = library_surface("S04")

    difference = bracket_class(surface, BRACKET_IDENTITIES[name], 3)

    assert epsilon(difference) == 0
    assert isinstance(membership_certificate(difference, 2), Certificate), name
