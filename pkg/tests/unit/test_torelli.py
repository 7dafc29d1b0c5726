from __future__ import annotations

import pytest

from core import torelli
from core.coeff import HSeries
from core.config.models import CertificateConfig, TruncationPolicy
from core.exceptions import InvalidPair, UnknownRelation
from core.filtration import Wedge3
from core.skein import SkeinElement
from core.surface import band_core, library_surface, outer_curve
from core.torelli import (
    FAIL,
    INCONCLUSIVE,
    PASS,
    RELATIONS,
    CurveBook,
    IdentityCheck,
    RelationContext,
    TorelliGen,
    TorelliWord,
    _aggregate,
    _check_zero,
    johnson_tau_classical,
    library_panel,
    make_generator,
    relation_ids,
    verify_relation,
    zeta,
)

POLICY = TruncationPolicy(h_order=3, filt_cap=4, depth=3)
NARROW = CertificateConfig(twist_depth=0)


def _bare(kind: str, *curves) -> TorelliGen:
    return TorelliGen(kind, tuple(curves), SkeinElement.zero(curves[0].surface, 4))


def test_relation_library_is_complete() -> None:
    assert set(relation_ids()) >= {
        "F1", "F2", "F3", "F4", "F5", "F6", "F7", "F8",
        "lantern", "crossed-lantern", "push-pair", "dehn-twist",
        "bch-laws", "johnson", "genus-one-boundary",
    }


def test_unknown_relation_and_wrong_surface() -> None:
    with pytest.raises(UnknownRelation):
        verify_relation("no-such-relation")
    with pytest.raises(UnknownRelation):
        verify_relation("lantern", surface="S11")


def test_separating_generator_needs_null_homology() -> None:
    surface = library_surface("S11")

    with pytest.raises(InvalidPair):
        make_generator("sep", [band_core(surface, "a")], POLICY)


def test_bounding_pair_validation() -> None:
    surface = library_surface("S04")
    p, q = band_core(surface, "p"), band_core(surface, "q")

    with pytest.raises(InvalidPair):
        make_generator("bp", [p, p], POLICY)
    with pytest.raises(InvalidPair):
        make_generator("bp", [p, q], POLICY)


def test_commutator_needs_algebraic_disjointness() -> None:
    surface = library_surface("S11")

    with pytest.raises(InvalidPair):
        make_generator("comm", [band_core(surface, "a"), band_core(surface, "b")], POLICY)
    with pytest.raises(InvalidPair):
        make_generator("spin", [band_core(surface, "a")], POLICY)


def test_word_twists_are_inverted_in_reverse() -> None:
    surface = library_surface("S04")
    p, q = band_core(surface, "p"), band_core(surface, "q")
    gen = _bare("bp", p, q)

    word = TorelliWord.of(gen)

    assert word.twists == ((p, 1), (q, -1))
    assert word.inverse().twists == ((q, 1), (p, -1))
    assert len(word * word.inverse()) == 2
    assert zeta(TorelliWord(surface), POLICY).is_zero()


def test_classical_tau_of_the_golden_pair() -> None:
    tau = johnson_tau_classical("b2", [("a1", "b1")])

    assert tau == Wedge3.from_mapping({("a1", "b1", "b2"): -1})
    assert johnson_tau_classical("a1 b1 a1^-1 b1^-1", [("a2", "b2")]).is_zero()


def test_panel_starts_with_the_cores() -> None:
    surface = library_surface("S11")

    panel = library_panel(surface)

    assert [name for name, _ in panel[:2]] == ["a", "b"]
    assert len(panel) <= 6
    assert panel[0][1] == band_core(surface, "a")


def test_aggregate_takes_the_worst_verdict() -> None:
    ok = IdentityCheck("one", PASS, "exact")
    unsure = IdentityCheck("two", INCONCLUSIVE, "stalled")
    bad = IdentityCheck("three", FAIL, "nonzero")

    assert _aggregate([ok], None) == (PASS, "pass")
    assert _aggregate([ok, unsure], True)[0] == INCONCLUSIVE
    assert _aggregate([ok, unsure, bad], True)[0] == FAIL
    assert _aggregate([ok], False)[0] == FAIL


def test_outer_curve_of_a_handle_separates() -> None:
    surface = library_surface("S21")

    assert outer_curve(surface, ["a1", "b1"]).homology().is_zero()


def _context(name: str) -> RelationContext:
    surface = library_surface(name)
    return RelationContext(surface, CurveBook(surface), POLICY, NARROW)


def test_planar_curves_count_as_separating() -> None:
    surface = library_surface("S04")

    gen = make_generator("sep", [outer_curve(surface, ["p", "r"])], POLICY)

    assert gen.kind == "sep"
    assert _context("S04").separating("c12") == outer_curve(surface, ["p", "q"])


def test_context_rejects_pairs_outside_the_hypotheses() -> None:
    sphere, torus = _context("S04"), _context("S11")

    with pytest.raises(InvalidPair):
        sphere.bounding_pair("c2", "c12")
    with pytest.raises(InvalidPair):
        sphere.bounding_pair("c1", "c1")
    with pytest.raises(InvalidPair):
        torus.separating("x")
    with pytest.raises(InvalidPair):
        torus.mu_zero("x", "y")


def test_library_instances_meet_their_hypotheses() -> None:
    genus_two, genus_three = _context("S21"), _context("S31")

    genus_two.bounding_pair("b2", "bp1")
    genus_two.bounding_pair("sep1", "sep2")
    genus_two.mu_zero("sep2", "bp1")
    for first, second in (("b3", "h3"), ("h3", "hh3"), ("b3", "hh3")):
        genus_three.bounding_pair(first, second)
    curves = [genus_three.curves[n] for n in ("b3", "h3", "hh3")]
    base = curves[0].homology()
    assert all((c.homology() - base).is_zero() or (c.homology() + base).is_zero() for c in curves)
    assert not base.is_zero()


def test_chain_rule_lives_on_genus_three() -> None:
    assert RELATIONS["F3"].surfaces == ("S31",)
    with pytest.raises(UnknownRelation):
        verify_relation("F3", surface="S21")


def test_builder_raises_on_a_bad_instance() -> None:
    surface = library_surface("S21")

    with pytest.raises(InvalidPair):
        verify_relation("F7", {"b2": band_core(surface, "a1")}, POLICY)


def test_zero_check_needs_a_vanishing_disk_on_positive_genus() -> None:
    ctx = _context("S11")
    ctx._panel = []
    value = SkeinElement.scalar(ctx.surface, HSeries.h_power(1, 4), 4)

    check = _check_zero("h", value, ctx)

    assert check.verdict == FAIL
    assert check.disk_eval is not None
    assert not check.disk_eval.is_zero()


def test_crossed_lantern_reports_the_disk_evaluation(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setattr(torelli, "acts_trivially", lambda *args, **kwargs: True)

    instance = RELATIONS["crossed-lantern"].builder(_context("S12"))

    kinds = {identity.name: identity.kind for identity in instance.identities}
    assert kinds["crossed lantern"] == "zero"
    assert kinds["disk evaluation"] == "series"
