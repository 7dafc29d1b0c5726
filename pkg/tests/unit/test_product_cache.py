from __future__ import annotations

import orjson
import pytest

from core.skein import SkeinAlgebra
from core.storage import ProductCache
from core.surface import band_core, library_surface


@pytest.fixture
def torus():
    surface = library_surface("S11")
    return surface, band_core(surface, "a"), band_core(surface, "b")


def test_round_trip_through_disk(tmp_path, torus) -> None:
    surface, a, b = torus
    cache = ProductCache(tmp_path)
    table = SkeinAlgebra(surface, 4).product(a, b)

    path = cache.save(surface, a, b, table)

    assert path.exists()
    assert cache.load(surface, a, b) == table
    assert cache.stats["hits"] == 1
    assert cache.summary()["records"] == 1


def test_missing_record_is_a_miss(tmp_path, torus) -> None:
    surface, a, b = torus
    cache = ProductCache(tmp_path)

    assert cache.load(surface, a, b) is None
    assert cache.stats["misses"] == 1


def test_tampered_record_is_discarded(tmp_path, torus) -> None:
    surface, a, b = torus
    cache = ProductCache(tmp_path)
    path = cache.save(surface, a, b, SkeinAlgebra(surface, 4).product(a, b))
    record = orjson.loads(path.read_bytes())
    record["body"]["entries"][0]["poly"] = {"0": "7"}
    path.write_bytes(orjson.dumps(record))

    assert cache.load(surface, a, b) is None
    assert cache.stats["corrupt"] == 1
    assert not path.exists()


def test_garbage_record_is_discarded(tmp_path, torus) -> None:
    surface, a, b = torus
    cache = ProductCache(tmp_path)
    path = cache.path_for(surface, a, b)
    path.parent.mkdir(parents=True)
    path.write_bytes(b"{not json")

    assert cache.load(surface, a, b) is None
    assert cache.stats["corrupt"] == 1


def test_algebra_reads_products_from_the_store(tmp_path, torus) -> None:
    surface, a, b = torus
    store = ProductCache(tmp_path)
    first = SkeinAlgebra(surface, 4, store=store)
    expected = first.product(a, b)

    second = SkeinAlgebra(surface, 4, store=store)

    assert second.product(a, b) == expected
    assert second.stats["misses"] == 0
    assert store.stats["writes"] == 1


def test_clear_removes_every_record(tmp_path, torus) -> None:
    surface, a, b = torus
    cache = ProductCache(tmp_path)
    algebra = SkeinAlgebra(surface, 4)
    cache.save(surface, a, b, algebra.product(a, b))
    cache.save(surface, b, a, algebra.product(b, a))

    assert cache.clear() == 2
    assert cache.records() == []
