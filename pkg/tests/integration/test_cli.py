from __future__ import annotations

import orjson
import pytest

from cli_gw.__main__ import main
from cli_gw.app import build_parser

FAST = ["--h-order", "2", "--filt-cap", "4", "--depth", "1", "--no-cache", "--json"]


@pytest.fixture(autouse=True)
def clean_env(monkeypatch: pytest.MonkeyPatch, tmp_path) -> None:
    monkeypatch.delenv("SKEIN_FORGE_CACHE", raising=False)
    monkeypatch.setenv("SKEIN_FORGE_CONFIG", str(tmp_path / "absent.yaml"))


def _json(capsys: pytest.CaptureFixture[str]) -> dict:
    return orjson.loads(capsys.readouterr().out)


def test_parser_knows_every_command() -> None:
    parser = build_parser()

    args = parser.parse_args(["verify", "lantern", "--surface", "S04", "--jobs", "2"])

    assert args.command == "verify"
    assert args.jobs == 2
    assert parser.parse_args(["cache", "clear"]).action == "clear"


def test_usage_errors_exit_with_failure() -> None:
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])

    assert info.value.code == 1


def test_compute_scalar(capsys: pytest.CaptureFixture[str]) -> None:
    code = main(["compute", "eps(c1)", "--surface", "S04", *FAST])
    report = _json(capsys)

    assert code == 0
    assert report["kind"] == "scalar"
    assert report["value"] == "-2"
    assert report["policy"]["h_order"] == 2


def test_compute_reports_parse_errors(capsys: pytest.CaptureFixture[str]) -> None:
    code = main(["compute", "mul(c1,, c2)", "--surface", "S04", *FAST])

    assert code == 1
    assert "position 7" in capsys.readouterr().err


def test_compute_needs_a_surface() -> None:
    assert main(["compute", "eps(c1)", *FAST]) == 1


def test_compute_with_a_definition_file(tmp_path, capsys: pytest.CaptureFixture[str]) -> None:
    definitions = tmp_path / "torus.skein"
    definitions.write_text("surface T order a+ b+ a- b-\ncurve x core a\n", encoding="utf-8")

    code = main(["compute", "eps(x + 2)", "--surface", str(definitions), *FAST])

    assert code == 0
    assert _json(capsys)["value"] == "0"


def test_unknown_relation_fails(capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["verify", "no-such-relation", *FAST]) == 1
    assert "unknown relation" in capsys.readouterr().err


def test_surfaces_listing(capsys: pytest.CaptureFixture[str]) -> None:
    code = main(["surfaces", "--json"])
    listing = _json(capsys)

    assert code == 0
    assert [s["name"] for s in listing["surfaces"]] == ["S04", "S11", "S12", "S21", "S31"]
    assert "lantern" in listing["relations"]


def test_cache_stats_and_clear(tmp_path, capsys: pytest.CaptureFixture[str]) -> None:
    cache = tmp_path / "cache"

    assert main(["compute", "mul(c1, c2)", "--surface", "S04", "--cache", str(cache), "--json"]) == 0
    capsys.readouterr()
    assert main(["cache", "stats", "--cache", str(cache), "--json"]) == 0
    stats = _json(capsys)
    assert stats["records"] >= 1

    assert main(["cache", "clear", "--cache", str(cache), "--json"]) == 0
    cleared = _json(capsys)
    assert cleared["removed"] == stats["records"]
    assert cleared["records"] == 0


def test_environment_cache_wins_over_the_flag(tmp_path, monkeypatch: pytest.MonkeyPatch, capsys) -> None:
    chosen = tmp_path / "env-cache"
    monkeypatch.setenv("SKEIN_FORGE_CACHE", str(chosen))

    assert main(["cache", "stats", "--cache", str(tmp_path / "flag"), "--json"]) == 0
    assert _json(capsys)["directory"] == str(chosen)
