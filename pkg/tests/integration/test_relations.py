from __future__ import annotations

import pytest

from core.config.models import TruncationPolicy
from core.filtration import Wedge3
from core.lie import L_of_curve, certify, exp_sigma_steps, truncate_filtration, working_precision
from core.skein import element
from core.surface import band_core, dehn_twist, library_surface
from core.torelli import (
    LIBRARY_CURVES,
    LIBRARY_PAIRS,
    PASS,
    CurveBook,
    johnson_tau_classical,
    johnson_tau_skein,
    make_generator,
    pinned_twist_sign,
    relation_ids,
    verify_relation,
)

pytestmark = pytest.mark.slow

SMALL = TruncationPolicy(h_order=3, filt_cap=4, depth=3)
DEFAULT = TruncationPolicy()


@pytest.mark.parametrize("relation_id", relation_ids())
def test_library_relation_passes(relation_id: str) -> None:
    report = verify_relation(relation_id, policy=SMALL)

    assert report.verdict == PASS, report.detail
    assert report.exit_code == 0
    assert report.checks
    assert all(check.verdict == PASS for check in report.checks)


@pytest.mark.parametrize("surface", ["S11", "S04", "S12", "S21"])
def test_dehn_twist_on_every_library_surface(surface: str) -> None:
    report = verify_relation("dehn-twist", policy=SMALL, surface=surface)

    assert report.verdict == PASS, (surface, report.detail)


def test_twist_sign_is_pinned() -> None:
    assert pinned_twist_sign() in (1, -1)


def test_reports_are_byte_stable() -> None:
    first = verify_relation("F1", policy=SMALL).to_json()
    second = verify_relation("F1", policy=SMALL).to_json()

    assert first == second


def test_lantern_disk_evaluation_vanishes_at_the_default_policy() -> None:
    report = verify_relation("lantern", policy=DEFAULT)
    disk = next(check for check in report.checks if check.name == "disk evaluation")

    assert report.verdict == PASS, report.detail
    assert disk.verdict == PASS
    assert disk.disk_eval is not None and disk.disk_eval.is_zero()
    assert report.geometric is True


def test_dehn_twist_on_the_torus_at_the_default_policy() -> None:
    report = verify_relation("dehn-twist", policy=DEFAULT, surface="S11")
    (check,) = report.checks

    assert report.verdict == PASS, report.detail
    assert check.certified_degree is None or check.certified_degree >= 6


def test_partial_sums_approach_the_twist_image() -> None:
    surface = library_surface("S11")
    x, y = band_core(surface, "a"), band_core(surface, "b")
    prec = working_precision(DEFAULT)
    target = element(dehn_twist(x, y, pinned_twist_sign()), prec)

    degrees = []
    for step in exp_sigma_steps(L_of_curve(x, DEFAULT), element(y, prec), DEFAULT):
        gap = step.partial - target
        if truncate_filtration(gap, DEFAULT.filt_cap).truncate(DEFAULT.h_order).is_zero():
            degrees.append(DEFAULT.filt_cap)
        else:
            degrees.append(min(certify(gap, DEFAULT), DEFAULT.filt_cap))

    assert degrees == sorted(degrees)
    assert degrees[-1] >= 6


def test_crossed_lantern_passes_both_checks_at_the_default_policy() -> None:
    report = verify_relation("crossed-lantern", policy=DEFAULT)
    verdicts = {check.name: check.verdict for check in report.checks}

    assert report.verdict == PASS, report.detail
    assert verdicts["crossed lantern"] == PASS
    assert verdicts["disk evaluation"] == PASS


def test_chain_rule_on_genus_three_at_the_default_policy() -> None:
    report = verify_relation("F3", policy=DEFAULT)

    assert report.surface == "S31"
    assert report.verdict == PASS, report.detail


@pytest.mark.parametrize(("band", "partner", "handles"), LIBRARY_PAIRS)
def test_skein_tau_matches_the_classical_one(band: str, partner: str, handles) -> None:
    curves = CurveBook(library_surface("S21"))
    gen = make_generator("bp", (curves[band], curves[partner]), SMALL)

    assert johnson_tau_skein(gen, SMALL) == johnson_tau_classical(band, handles)


def test_separating_twists_have_no_tau() -> None:
    curves = CurveBook(library_surface("S21"))

    for name in ("sep1", "sep2"):
        assert name in LIBRARY_CURVES["S21"]
        gen = make_generator("sep", (curves[name],), SMALL)
        assert johnson_tau_skein(gen, SMALL) == Wedge3()
