"""Helpers for loading application configuration."""

from __future__ import annotations

import os
from pathlib import Path
from typing import Any, Dict

import yaml
from dotenv import load_dotenv
from pydantic import ValidationError

from .models import Settings

CONFIG_ENV_VAR = "SKEIN_FORGE_CONFIG"
CACHE_ENV_VAR = "SKEIN_FORGE_CACHE"
DEFAULT_CONFIG_PATH = Path("config/skein-forge.yaml")


def _load_file(path: Path) -> Dict[str, Any]:
    if not path.exists():
        return {}
    with path.open("r", encoding="utf-8") as handle:
        return yaml.safe_load(handle) or {}


def _apply_env(target: Dict[str, Any], key: str, value: Any) -> None:
    if value is not None and value != "":
        target[key] = value


def _inject_env_overrides(raw: Dict[str, Any]) -> Dict[str, Any]:
    policy = raw.setdefault("policy", {})
    _apply_env(policy, "h_order", os.getenv("SKEIN_FORGE_H_ORDER"))
    _apply_env(policy, "filt_cap", os.getenv("SKEIN_FORGE_FILT_CAP"))
    _apply_env(policy, "depth", os.getenv("SKEIN_FORGE_DEPTH"))

    cache = raw.setdefault("cache", {})
    _apply_env(cache, "directory", os.getenv(CACHE_ENV_VAR))

    return raw


def load_settings(
    config_path: str | os.PathLike[str] | None = None,
    overrides: Dict[str, Dict[str, Any]] | None = None,
) -> Settings:
    """Load settings from YAML, environment variables and explicit overrides.

    Environment variables beat the file and command-line overrides beat both,
    except that ``SKEIN_FORGE_CACHE`` also beats ``--cache``.
    """

    load_dotenv(override=False)
    chosen_path = (
        Path(config_path) if config_path else Path(os.getenv(CONFIG_ENV_VAR, DEFAULT_CONFIG_PATH))
    )
    hydrated = _inject_env_overrides(_load_file(chosen_path))
    for section, values in (overrides or {}).items():
        target = hydrated.setdefault(section, {})
        for key, value in values.items():
            _apply_env(target, key, value)
    _apply_env(hydrated["cache"], "directory", os.getenv(CACHE_ENV_VAR))

    try:
        return Settings(**hydrated)
    except ValidationError as exc:
        raise RuntimeError(f"Invalid configuration: {exc}") from exc
