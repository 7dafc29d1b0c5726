import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from core.config.models import CacheConfig, PolicyConfig, Settings  # noqa: E402
from core.surface import Surface, library_surface  # noqa: E402


@pytest.fixture
def fast_settings() -> Settings:
    """Smallest policy the engine accepts, no product cache on disk."""

    return Settings(
        policy=PolicyConfig(h_order=2, filt_cap=4, depth=1),
        cache=CacheConfig(enabled=False),
    )


@pytest.fixture
def four_holed_sphere() -> Surface:
    return library_surface("S04")
