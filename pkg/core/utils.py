"""Utility helpers shared by the engine and the command line."""

from __future__ import annotations

import hashlib
import time
from contextlib import contextmanager
from typing import Iterator, List

from rich.console import Console

# Diagnostics go to stderr so reports on stdout stay byte-stable.
console = Console(stderr=True)


def compute_hash(*parts: str) -> str:
    """Stable SHA-256 digest of ``|``-joined parts."""

    digest = hashlib.sha256()
    for index, part in enumerate(parts):
        if index:
            digest.update(b"|")
        digest.update(part.encode("utf-8"))
    return digest.hexdigest()


@contextmanager
def stopwatch() -> Iterator[List[float]]:
    """Yield a one-element list that receives the elapsed seconds on exit."""

    elapsed = [0.0]
    start = time.perf_counter()
    try:
        yield elapsed
    finally:
        elapsed[0] = time.perf_counter() - start
