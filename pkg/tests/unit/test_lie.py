from __future__ import annotations

from fractions import Fraction

import pytest

from core.config.models import TruncationPolicy
from core.exceptions import NotAdmissible, NotEmbeddable
from core.filtration import degree_lower_bound
from core.lie import (
    L_of_curve,
    bch,
    check_bch_admissible,
    dynkin_coefficient,
    exp_sigma,
    working_precision,
)
from core.skein import SkeinElement, epsilon
from core.surface import band_core, library_surface

POLICY = TruncationPolicy(h_order=3, filt_cap=4, depth=3)


def test_working_precision_adds_depth() -> None:
    assert working_precision(TruncationPolicy()) == 20
    assert working_precision(POLICY) == 6


def test_policy_rejects_small_caps() -> None:
    with pytest.raises(ValueError):
        TruncationPolicy(filt_cap=2)


@pytest.mark.parametrize(
    ("word", "expected"),
    [((0,), Fraction(1)), ((0, 1), Fraction(1, 2)), ((1, 0), Fraction(-1, 2)), ((0, 0), Fraction(0))],
)
def test_dynkin_coefficients(word, expected) -> None:
    assert dynkin_coefficient(word) == expected


def test_log_of_a_curve_lies_in_the_augmentation_kernel() -> None:
    surface = library_surface("S11")
    value = L_of_curve(band_core(surface, "a"), POLICY)

    assert epsilon(value) == 0
    assert degree_lower_bound(value) == 2
    assert value.err_order == 4
    assert value.prec == working_precision(POLICY)


def test_log_needs_a_single_curve() -> None:
    surface = library_surface("S04")
    pair = band_core(surface, "p").power(2)

    with pytest.raises(NotEmbeddable):
        L_of_curve(pair, POLICY)


def test_crossing_logs_are_not_admissible() -> None:
    surface = library_surface("S11")
    x = L_of_curve(band_core(surface, "a"), POLICY)
    y = L_of_curve(band_core(surface, "b"), POLICY)

    report = check_bch_admissible([x, y])

    assert not report.admissible
    with pytest.raises(NotAdmissible):
        bch([x, y], POLICY)


def test_disjoint_logs_are_admissible() -> None:
    surface = library_surface("S04")
    x = L_of_curve(band_core(surface, "p"), POLICY)
    y = L_of_curve(band_core(surface, "q"), POLICY)

    assert check_bch_admissible([x, y]).admissible


def test_bch_of_one_argument_is_the_argument() -> None:
    surface = library_surface("S04")
    x = L_of_curve(band_core(surface, "p"), POLICY)

    assert bch([x], POLICY) is x
    with pytest.raises(ValueError):
        bch([], POLICY)


def test_exp_sigma_fixes_disjoint_curves() -> None:
    surface = library_surface("S04")
    x = L_of_curve(band_core(surface, "p"), POLICY)
    z = SkeinElement.of(band_core(surface, "q"), working_precision(POLICY))

    assert exp_sigma(x, z, POLICY).agrees_with(z)
    assert exp_sigma(SkeinElement.zero(surface, 6), z, POLICY) is z
