from __future__ import annotations

from fractions import Fraction

import pytest

from cli_gw.evaluator import evaluate_expression, value_json, value_kind
from cli_gw.parser import BinOp, Call, Name, Scale, load_definitions, parse_definitions, parse_expression
from core.coeff import HSeries
from core.config.models import Settings
from core.exceptions import MalformedSpec, NotEmbeddable, ParseError
from core.services import SkeinSession
from core.skein import SkeinElement
from core.surface import Surface

TORUS = """
# one-holed torus
surface T bands a b order a+ b+ a- b-
curve x core a
curve y core b
curve z twist x y 1
curve d boundary 1
curve w word a b
"""


@pytest.fixture
def session(fast_settings: Settings, four_holed_sphere: Surface) -> SkeinSession:
    return SkeinSession(fast_settings, four_holed_sphere)


def test_definition_file_builds_surface_and_curves() -> None:
    definitions = parse_definitions(TORUS)

    assert definitions.surface.genus == 1
    assert sorted(definitions.curves) == ["d", "w", "x", "y", "z"]
    assert definitions.curves["d"].homology().is_zero()
    assert definitions.curves["z"].component_count == 1


def test_curve_before_surface_is_rejected() -> None:
    with pytest.raises(ParseError) as info:
        parse_definitions("curve x core a\n")

    assert info.value.position == 0


def test_unknown_curve_reference_points_at_the_name() -> None:
    text = "surface T order a+ b+ a- b-\ncurve y core b\ncurve z twist q y\n"

    with pytest.raises(ParseError) as info:
        parse_definitions(text)

    assert text[info.value.position] == "q"


def test_declared_bands_must_match_the_order() -> None:
    with pytest.raises(MalformedSpec):
        parse_definitions("surface T bands a c order a+ b+ a- b-\n")
    with pytest.raises(MalformedSpec):
        parse_definitions("surface T order a+ b+ a- b-\ncurve x spiral a\n")


def test_library_names_and_missing_files(tmp_path) -> None:
    assert load_definitions("S12").surface.name == "S12"
    with pytest.raises(MalformedSpec):
        load_definitions(str(tmp_path / "nowhere.txt"))


def test_expression_tree() -> None:
    tree = parse_expression("2*x - 1/2*empty")

    assert tree == BinOp("-", Scale(Fraction(2), Name("x", 2)), Scale(Fraction(1, 2), Name("empty", 10)))


def test_calls_keep_positions() -> None:
    tree = parse_expression("bracket(L(x), y)")

    assert isinstance(tree, Call) and tree.name == "bracket"
    assert tree.args[0] == Call("L", (Name("x", 10),), 8)
    assert tree.args[1] == Name("y", 14)


@pytest.mark.parametrize(
    ("text", "position"),
    [("mul(x,, y)", 6), ("x $ y", 2), ("L(x", 3), ("x y", 2)],
)
def test_syntax_errors_carry_positions(text: str, position: int) -> None:
    with pytest.raises(ParseError) as info:
        parse_expression(text)

    assert info.value.position == position


def test_scalar_expressions(session: SkeinSession) -> None:
    value = evaluate_expression(session, "eps(c1)")

    assert value == Fraction(-2)
    assert value_kind(value) == "scalar"
    assert value_json(value) == "-2"
    assert evaluate_expression(session, "eps(2*c1 + 4)") == 0


def test_linear_combinations(session: SkeinSession) -> None:
    value = evaluate_expression(session, "2*c1 - c1")

    assert isinstance(value, SkeinElement)
    assert value.agrees_with(session.element(session.curve("c1")))


def test_disk_and_curve_values(session: SkeinSession) -> None:
    disk = evaluate_expression(session, "disk(c1)")
    curve = evaluate_expression(session, "twist(c1, c2)")

    assert isinstance(disk, HSeries)
    assert disk.coefficient(0) == -2
    assert value_kind(curve) == "curve"
    assert curve == session.curve("c2")


@pytest.mark.parametrize("text", ["zeta(spin, c1)", "frob(c1)", "bracket(c1)", "twist(c1, c2, 1/2)"])
def test_evaluation_errors(session: SkeinSession, text: str) -> None:
    with pytest.raises(ParseError):
        evaluate_expression(session, text)


def test_unknown_curve(session: SkeinSession) -> None:
    with pytest.raises(NotEmbeddable):
        evaluate_expression(session, "nowhere")
