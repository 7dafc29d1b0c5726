"""Configuration utilities for skein-forge."""

from .loader import load_settings
from .models import Settings, TruncationPolicy

__all__ = ["Settings", "TruncationPolicy", "load_settings"]
