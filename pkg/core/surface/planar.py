"""Kauffman state sums for straight chords in a disk.

Boundary points are identified by their rank in counterclockwise order. Chords
are realized as straight segments between points on a parabola, which makes
all crossing parameters exact rationals; the layout is re-salted if two
crossings on one chord would coincide.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import Dict, Iterator, List, Sequence, Tuple

Arm = Tuple[int, int]


def _layout(size: int, salt: int) -> List[Tuple[Fraction, Fraction]]:
    points = []
    for rank in range(size):
        x = Fraction(rank) + (Fraction(1, (rank + 2) * (rank + 3) * (salt + 1)) if salt else 0)
        points.append((x, x * x))
    return points


def _cross(ax: Fraction, ay: Fraction, bx: Fraction, by: Fraction) -> Fraction:
    return ax * by - ay * bx


def interleaved(first: Tuple[int, int], second: Tuple[int, int]) -> bool:
    lo, hi = sorted(first)
    return (lo < second[0] < hi) != (lo < second[1] < hi)


class ChordSystem:
    """Chords in one disk with a height per chord; higher chords pass over."""

    def __init__(
        self,
        ends: Sequence[Tuple[int, int]],
        heights: Sequence[int],
        size: int,
        mirror: bool = False,
    ) -> None:
        self.ends = [tuple(e) for e in ends]
        self.heights = list(heights)
        self.size = size
        self.mirror = mirror
        self.crossings: List[Tuple[int, int]] = []
        for i in range(len(self.ends)):
            for j in range(i + 1, len(self.ends)):
                if interleaved(self.ends[i], self.ends[j]):
                    if self.heights[i] == self.heights[j]:
                        raise ValueError("crossing chords need distinct heights")
                    over, under = (i, j) if self.heights[i] > self.heights[j] else (j, i)
                    self.crossings.append((over, under))
        self._order_crossings()
        self._build_pairings()

    # ------------------------------------------------------------------
    # Geometry
    # ------------------------------------------------------------------
    def _order_crossings(self) -> None:
        salt = 0
        while True:
            points = _layout(self.size, salt)
            params: List[List[Tuple[Fraction, int]]] = [[] for _ in self.ends]
            for number, (i, j) in enumerate(self.crossings):
                params[i].append((self._parameter(points, i, j), number))
                params[j].append((self._parameter(points, j, i), number))
            if all(len({t for t, _ in row}) == len(row) for row in params):
                break
            salt += 1
        self.along: List[List[int]] = [[n for _, n in sorted(row)] for row in params]
        self.vertex: Dict[Tuple[int, int], int] = {}
        for chord, row in enumerate(self.along):
            for index, number in enumerate(row, start=1):
                self.vertex[(number, chord)] = index

    def _parameter(self, points: List[Tuple[Fraction, Fraction]], i: int, j: int) -> Fraction:
        (px, py), (qx, qy) = points[self.ends[i][0]], points[self.ends[i][1]]
        (rx, ry), (sx, sy) = points[self.ends[j][0]], points[self.ends[j][1]]
        dx, dy = sx - rx, sy - ry
        return _cross(rx - px, ry - py, dx, dy) / _cross(qx - px, qy - py, dx, dy)

    def _between(self, x: int, start: int, end: int) -> bool:
        if self.mirror:
            start, end = end, start
        if start < end:
            return start < x < end
        return x > start or x < end

    def _build_pairings(self) -> None:
        self.pair_a: List[Dict[Arm, Arm]] = []
        self.pair_b: List[Dict[Arm, Arm]] = []
        for over, under in self.crossings:
            oa, ob = self.ends[over]
            ua, _ = self.ends[under]
            p, q = (over, 0), (over, 1)
            r, s = ((under, 0), (under, 1)) if self._between(ua, oa, ob) else ((under, 1), (under, 0))
            self.pair_a.append({p: s, s: p, r: q, q: r})
            self.pair_b.append({p: r, r: p, q: s, s: q})

    # ------------------------------------------------------------------
    # States
    # ------------------------------------------------------------------
    def states(self) -> Iterator[Tuple[bool, ...]]:
        return product((True, False), repeat=len(self.crossings))

    def smooth(self, state: Sequence[bool]) -> Tuple[Dict[int, int], int]:
        """Endpoint matching and number of closed loops for one state (True = A)."""

        pairs = [self.pair_a[k] if choice else self.pair_b[k] for k, choice in enumerate(state)]
        visited: set[Tuple[int, int]] = set()
        matching: Dict[int, int] = {}

        def run(chord: int, vertex: int, direction: int, stop: Tuple[int, int] | None) -> Tuple[int, int]:
            while True:
                nxt = vertex + direction
                visited.add((chord, min(vertex, nxt)))
                last = len(self.along[chord]) + 1
                if nxt == 0 or nxt == last:
                    return chord, nxt
                number = self.along[chord][nxt - 1]
                arm = (chord, 0 if direction == 1 else 1)
                chord, side = pairs[number][arm]
                vertex = self.vertex[(number, chord)]
                direction = 1 if side == 1 else -1
                if stop is not None and (chord, min(vertex, vertex + direction)) == stop:
                    return chord, -1

        for chord, (a, b) in enumerate(self.ends):
            for end_rank, vertex, direction in ((a, 0, 1), (b, len(self.along[chord]) + 1, -1)):
                if end_rank in matching:
                    continue
                final_chord, final_vertex = run(chord, vertex, direction, None)
                other = self.ends[final_chord][0 if final_vertex == 0 else 1]
                matching[end_rank] = other
                matching[other] = end_rank

        loops = 0
        for chord, row in enumerate(self.along):
            for start in range(1, len(row)):
                segment = (chord, start)
                if segment in visited:
                    continue
                loops += 1
                run(chord, start, 1, segment)
        return matching, loops

    def exponent(self, state: Sequence[bool]) -> int:
        return sum(1 if choice else -1 for choice in state)
