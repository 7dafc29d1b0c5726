"""Skein algebra engine core package."""

from .services import SkeinSession
from .config.models import Settings
from .config.loader import load_settings

__all__ = ["SkeinSession", "Settings", "load_settings"]
