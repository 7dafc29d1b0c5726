from __future__ import annotations

import pytest

from core.config import load_settings

YAML = """
policy:
  h_order: 5
  filt_cap: 4
cache:
  directory: from-file
report:
  format: json
"""


@pytest.fixture(autouse=True)
def clean_env(monkeypatch: pytest.MonkeyPatch) -> None:
    for name in ("SKEIN_FORGE_CACHE", "SKEIN_FORGE_CONFIG", "SKEIN_FORGE_H_ORDER", "SKEIN_FORGE_FILT_CAP", "SKEIN_FORGE_DEPTH"):
        monkeypatch.delenv(name, raising=False)


def test_file_values_are_loaded(tmp_path) -> None:
    path = tmp_path / "settings.yaml"
    path.write_text(YAML, encoding="utf-8")

    settings = load_settings(path)

    assert settings.policy.h_order == 5
    assert settings.policy.filt_cap == 4
    assert settings.policy.depth == 12
    assert settings.report.format == "json"
    assert settings.truncation_policy().describe() == "up to (h^5, F^4), depth 12"


def test_missing_file_gives_defaults(tmp_path) -> None:
    settings = load_settings(tmp_path / "absent.yaml")

    assert settings.policy.h_order == 8
    assert settings.cache.directory is None


def test_overrides_beat_the_file_but_skip_none(tmp_path) -> None:
    path = tmp_path / "settings.yaml"
    path.write_text(YAML, encoding="utf-8")

    settings = load_settings(path, {"policy": {"h_order": 2, "depth": None}, "cache": {"directory": "flag"}})

    assert settings.policy.h_order == 2
    assert settings.policy.depth == 12
    assert settings.cache.directory == "flag"


def test_cache_environment_variable_wins(tmp_path, monkeypatch: pytest.MonkeyPatch) -> None:
    path = tmp_path / "settings.yaml"
    path.write_text(YAML, encoding="utf-8")
    monkeypatch.setenv("SKEIN_FORGE_CACHE", "from-env")

    settings = load_settings(path, {"cache": {"directory": "flag"}})

    assert settings.cache.directory == "from-env"


def test_flags_beat_policy_environment_variables(tmp_path, monkeypatch: pytest.MonkeyPatch) -> None:
    path = tmp_path / "settings.yaml"
    path.write_text(YAML, encoding="utf-8")
    monkeypatch.setenv("SKEIN_FORGE_H_ORDER", "6")
    monkeypatch.setenv("SKEIN_FORGE_DEPTH", "7")

    settings = load_settings(path, {"policy": {"h_order": 3, "depth": None}})

    assert settings.policy.h_order == 3
    assert settings.policy.depth == 7
    assert settings.policy.filt_cap == 4


def test_policy_environment_variables_beat_the_file(tmp_path, monkeypatch: pytest.MonkeyPatch) -> None:
    path = tmp_path / "settings.yaml"
    path.write_text(YAML, encoding="utf-8")
    monkeypatch.setenv("SKEIN_FORGE_FILT_CAP", "5")

    assert load_settings(path).policy.filt_cap == 5


def test_invalid_policy_is_reported(tmp_path) -> None:
    with pytest.raises(RuntimeError):
        load_settings(tmp_path / "absent.yaml", {"policy": {"filt_cap": 2}})
