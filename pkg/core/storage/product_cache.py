"""Content-addressed on-disk cache of multicurve products."""

from __future__ import annotations

import os
import tempfile
from pathlib import Path
from typing import Dict, List, Optional

import orjson
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt, wait_fixed

from ..coeff import LaurentPoly
from ..exceptions import CorruptCache
from ..surface.curves import Multicurve
from ..surface.diagram import Chord, TangleDiagram
from ..surface.model import Surface
from ..utils import compute_hash, console

RECORD_VERSION = 1

ProductTable = Dict[Multicurve, LaurentPoly]


def _key_text(curve: Multicurve) -> str:
    return orjson.dumps(curve.key_json(), option=orjson.OPT_SORT_KEYS).decode("utf-8")


def _drawing_json(curve: Multicurve) -> Dict[str, object]:
    drawing = curve.drawing()
    return {
        "tracks": list(drawing.tracks),
        "chords": [[list(c.tail), list(c.head), c.height] for c in drawing.chords],
    }


def _drawing_from_json(surface: Surface, data: Dict[str, object]) -> Multicurve:
    chords = tuple(
        Chord(tuple(tail), tuple(head), int(height))  # type: ignore[arg-type]
        for tail, head, height in data["chords"]  # type: ignore[union-attr]
    )
    diagram = TangleDiagram(surface, tuple(data["tracks"]), chords)  # type: ignore[arg-type]
    curve, loops = Multicurve.from_diagram(diagram)
    if loops:
        raise CorruptCache("stored drawing contains trivial loops")
    return curve


class ProductCache:
    """One orjson record per product; writes are atomic, reads retried."""

    def __init__(self, directory: str | os.PathLike[str]) -> None:
        self._root = Path(directory)
        self._root.mkdir(parents=True, exist_ok=True)
        self.stats = {"hits": 0, "misses": 0, "writes": 0, "corrupt": 0}

    @property
    def root(self) -> Path:
        return self._root

    def path_for(self, surface: Surface, top: Multicurve, bottom: Multicurve) -> Path:
        name = compute_hash(surface.spec_hash, _key_text(top), _key_text(bottom))
        return self._root / name[:2] / f"{name}.json"

    # ------------------------------------------------------------------
    # Records
    # ------------------------------------------------------------------
    @staticmethod
    def _body(surface: Surface, top: Multicurve, bottom: Multicurve, table: ProductTable) -> Dict[str, object]:
        entries = [
            {"key": key.key_json(), "drawing": _drawing_json(key), "poly": poly.to_json()}
            for key, poly in table.items()
        ]
        entries.sort(key=lambda e: orjson.dumps(e["key"], option=orjson.OPT_SORT_KEYS))
        return {
            "version": RECORD_VERSION,
            "surface": surface.spec_hash,
            "top": top.key_json(),
            "bottom": bottom.key_json(),
            "entries": entries,
        }

    @staticmethod
    def _checksum(body: Dict[str, object]) -> str:
        return compute_hash(orjson.dumps(body, option=orjson.OPT_SORT_KEYS).decode("utf-8"))

    def _read(self, path: Path) -> bytes:
        for attempt in Retrying(
            stop=stop_after_attempt(3),
            wait=wait_fixed(0.05),
            retry=retry_if_exception_type(PermissionError),
            reraise=True,
        ):
            with attempt:
                return path.read_bytes()
        raise CorruptCache(f"unreadable cache record {path}")  # pragma: no cover

    def _decode(self, surface: Surface, raw: bytes) -> ProductTable:
        try:
            record = orjson.loads(raw)
            body = record["body"]
            if record["checksum"] != self._checksum(body):
                raise CorruptCache("checksum mismatch")
            if body["version"] != RECORD_VERSION or body["surface"] != surface.spec_hash:
                raise CorruptCache("record belongs to another surface or format")
            table: ProductTable = {}
            for entry in body["entries"]:
                table[_drawing_from_json(surface, entry["drawing"])] = LaurentPoly.from_json(entry["poly"])
            return table
        except CorruptCache:
            raise
        except (orjson.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise CorruptCache(f"undecodable record: {exc}") from exc

    # ------------------------------------------------------------------
    # Public API
    # ------------------------------------------------------------------
    def load(self, surface: Surface, top: Multicurve, bottom: Multicurve) -> Optional[ProductTable]:
        path = self.path_for(surface, top, bottom)
        if not path.exists():
            self.stats["misses"] += 1
            return None
        try:
            table = self._decode(surface, self._read(path))
        except (CorruptCache, OSError) as exc:
            self.stats["corrupt"] += 1
            console.log(f"[yellow]cache record {path.name} discarded: {exc}[/yellow]")
            path.unlink(missing_ok=True)
            return None
        self.stats["hits"] += 1
        return table

    def save(self, surface: Surface, top: Multicurve, bottom: Multicurve, table: ProductTable) -> Path:
        path = self.path_for(surface, top, bottom)
        path.parent.mkdir(parents=True, exist_ok=True)
        body = self._body(surface, top, bottom, table)
        payload = orjson.dumps({"body": body, "checksum": self._checksum(body)}, option=orjson.OPT_SORT_KEYS)
        handle, temp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        try:
            with os.fdopen(handle, "wb") as stream:
                stream.write(payload)
            os.replace(temp, path)
        finally:
            if os.path.exists(temp):
                os.unlink(temp)
        self.stats["writes"] += 1
        return path

    def records(self) -> List[Path]:
        return sorted(self._root.glob("*/*.json"))

    def summary(self) -> Dict[str, object]:
        records = self.records()
        return {
            "directory": str(self._root),
            "records": len(records),
            "bytes": sum(p.stat().st_size for p in records),
            **self.stats,
        }

    def clear(self) -> int:
        records = self.records()
        for path in records:
            path.unlink(missing_ok=True)
        return len(records)
