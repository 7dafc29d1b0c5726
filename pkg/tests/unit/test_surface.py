from __future__ import annotations

from fractions import Fraction

import pytest

from core.exceptions import MalformedSpec, NotEmbeddable, ParseError, UnknownBand
from core.surface import (
    CurveWord,
    band_core,
    boundary_curve,
    crossing_number,
    curve_from_word,
    dehn_twist,
    homology_class,
    intersection_mu,
    library_surface,
    make_surface,
    outer_curve,
    parse_letters,
)


@pytest.mark.parametrize(
    ("name", "genus", "boundary"),
    [("S11", 1, 1), ("S04", 0, 4), ("S12", 1, 2), ("S21", 2, 1), ("S31", 3, 1)],
)
def test_library_topology(name: str, genus: int, boundary: int) -> None:
    surface = library_surface(name)

    assert surface.genus == genus
    assert surface.boundary_count == boundary
    assert surface.describe()["name"] == name


def test_band_needs_both_ends() -> None:
    with pytest.raises(MalformedSpec):
        make_surface("a+ a+")
    with pytest.raises(MalformedSpec):
        make_surface("a b")


def test_unknown_library_surface() -> None:
    with pytest.raises(MalformedSpec):
        library_surface("S99")


def test_spec_hash_tracks_the_band_order() -> None:
    assert make_surface("a+ b+ a- b-").spec_hash != make_surface("a+ a- b+ b-").spec_hash


def test_parse_letters_expands_powers() -> None:
    assert parse_letters("a b^-1 a^2") == (("a", 1), ("b", -1), ("a", 1), ("a", 1))


def test_parse_letters_reports_position() -> None:
    with pytest.raises(ParseError) as info:
        parse_letters("a 1b")

    assert info.value.position == 2


def test_curve_word_normal_form() -> None:
    conjugated = CurveWord.normalize(parse_letters("a b a^-1"))
    rotated = CurveWord.normalize(parse_letters("b a"))

    assert conjugated == CurveWord((("b", 1),))
    assert rotated == CurveWord.normalize(parse_letters("a b"))
    assert CurveWord.normalize(parse_letters("a a^-1")).is_trivial()


def test_commutator_is_null_homologous() -> None:
    assert homology_class(parse_letters("a b a^-1 b^-1")).is_zero()
    assert homology_class(parse_letters("a a b^-1")).as_dict() == {"a": Fraction(2), "b": Fraction(-1)}


def test_normalize_rejects_unknown_bands() -> None:
    with pytest.raises(UnknownBand):
        CurveWord.normalize(parse_letters("a z"), bands=("a", "b"))


def test_cores_of_the_torus_cross_once() -> None:
    surface = library_surface("S11")
    a, b = band_core(surface, "a"), band_core(surface, "b")

    assert crossing_number(a, b) == 1
    assert abs(intersection_mu(a, b)) == 1
    assert intersection_mu(a, b) == -intersection_mu(b, a)


def test_cores_of_the_sphere_are_disjoint() -> None:
    surface = library_surface("S04")
    p, q = band_core(surface, "p"), band_core(surface, "q")

    assert crossing_number(p, q) == 0
    assert intersection_mu(p, q) == 0


def test_curve_from_word_rejects_non_simple_and_trivial_words() -> None:
    surface = library_surface("S11")

    with pytest.raises(NotEmbeddable):
        curve_from_word(surface, parse_letters("a a"))
    with pytest.raises(NotEmbeddable):
        curve_from_word(surface, parse_letters("a a^-1"))
    with pytest.raises(UnknownBand):
        curve_from_word(surface, parse_letters("c"))


def test_boundary_curves() -> None:
    torus = library_surface("S11")

    assert boundary_curve(torus, 1).homology().is_zero()
    with pytest.raises(NotEmbeddable):
        boundary_curve(torus, 2)


def test_outer_curve_sums_the_cores() -> None:
    surface = library_surface("S04")
    klass = outer_curve(surface, ["p", "q"]).homology().as_dict()

    assert set(klass) == {"p", "q"}
    assert all(abs(value) == 1 for value in klass.values())


def test_twist_along_a_core() -> None:
    surface = library_surface("S11")
    a, b = band_core(surface, "a"), band_core(surface, "b")

    image = dehn_twist(a, b)
    klass = image.homology()

    assert image.component_count == 1
    assert abs(klass.coefficient("a")) == 1
    assert abs(klass.coefficient("b")) == 1
    assert dehn_twist(a, a) == a
    assert dehn_twist(a, b, 0) == b



@pytest.mark.parametrize("power", [1, -1, 2])
def test_twist_of_crossing_planar_curves_drops_disk_loops(power: int) -> None:
    surface = library_surface("S04")
    c12, c23 = outer_curve(surface, ["p", "q"]), outer_curve(surface, ["q", "r"])

    image = dehn_twist(c12, c23, power)
    before, after = c23.homology(), image.homology()

    assert image.component_count == 1
    assert not any(word.is_trivial() for word in image.components)
    assert (after - before).is_zero() or (after + before).is_zero()


def test_twist_of_a_separating_curve_on_genus_two() -> None:
    surface = library_surface("S21")
    sep2 = outer_curve(surface, ["a2", "b2"])
    bp1 = outer_curve(surface, ["a1", "b1", "b2"])

    image = dehn_twist(sep2, bp1)

    assert image.component_count == 1
    assert (image.homology() - bp1.homology()).is_zero() or (image.homology() + bp1.homology()).is_zero()
