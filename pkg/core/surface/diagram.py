"""Concrete drawings of tangles on a disk with bands.

A drawing is a set of straight chords in the disk whose endpoints are band
tracks or marked points on the disk boundary. Each band carries ``m`` parallel
tracks; track ``i`` at the ``+`` end is joined through the band to track
``m - 1 - i`` at the ``-`` end. Chords cross exactly when their endpoints
interleave; the higher chord passes over.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .model import Surface
from .words import CurveWord, Letter, Letters, format_letters, free_reduce, invert

TRACK = 0
MARK = 1

Point = Tuple[int, int, int]


@dataclass(frozen=True)
class Chord:
    tail: Point
    head: Point
    height: int = 0

    def other(self, point: Point) -> Point:
        return self.head if point == self.tail else self.tail

    def reversed(self) -> "Chord":
        return Chord(self.head, self.tail, self.height)


@dataclass(frozen=True)
class ArcKey:
    """An arc between two marked points, read from ``start`` to ``end``."""

    start: Point
    end: Point
    letters: Letters

    def __str__(self) -> str:
        return f"[{self.start[0]}.{self.start[2]} -> {self.end[0]}.{self.end[2]}: {format_letters(self.letters)}]"


@dataclass(frozen=True)
class Component:
    """One traced strand: chord indices in traversal order with direction flags."""

    closed: bool
    steps: Tuple[Tuple[int, bool], ...]
    letters: Letters
    start: Optional[Point] = None
    end: Optional[Point] = None


@dataclass(frozen=True)
class TangleDiagram:
    surface: Surface
    tracks: Tuple[int, ...]
    chords: Tuple[Chord, ...]

    # ------------------------------------------------------------------
    # Points and incidence
    # ------------------------------------------------------------------
    def track_count(self, band: str) -> int:
        return self.tracks[self.surface.bands.index(band)]

    def band_partner(self, point: Point) -> Point:
        slot, kind, pos = point
        if kind != TRACK:
            raise ValueError("marked points have no band partner")
        other = self.surface.partner(slot)
        count = self.track_count(self.surface.label_at(slot))
        return other, TRACK, count - 1 - pos

    @cached_property
    def ordered_points(self) -> Tuple[Point, ...]:
        return tuple(sorted(p for chord in self.chords for p in (chord.tail, chord.head)))

    @cached_property
    def rank(self) -> Dict[Point, int]:
        return {point: index for index, point in enumerate(self.ordered_points)}

    @cached_property
    def chord_at(self) -> Dict[Point, int]:
        index: Dict[Point, int] = {}
        for number, chord in enumerate(self.chords):
            index[chord.tail] = number
            index[chord.head] = number
        return index

    def validate(self) -> None:
        expected = set()
        for band, count in zip(self.surface.bands, self.tracks):
            for sign in (1, -1):
                slot = self.surface.slot(band, sign)
                expected.update((slot, TRACK, i) for i in range(count))
        seen = [p for chord in self.chords for p in (chord.tail, chord.head)]
        tracked = {p for p in seen if p[1] == TRACK}
        if len(seen) != len(set(seen)) or tracked != expected:
            raise ValueError("diagram points are not matched exactly once")

    # ------------------------------------------------------------------
    # Crossings
    # ------------------------------------------------------------------
    def _span(self, number: int) -> Tuple[int, int]:
        chord = self.chords[number]
        a, b = self.rank[chord.tail], self.rank[chord.head]
        return (a, b) if a < b else (b, a)

    def crossing_pairs(self) -> List[Tuple[int, int]]:
        spans = [self._span(i) for i in range(len(self.chords))]
        pairs: List[Tuple[int, int]] = []
        for i, (lo1, hi1) in enumerate(spans):
            for j in range(i + 1, len(spans)):
                lo2, hi2 = spans[j]
                if (lo1 < lo2 < hi1) != (lo1 < hi2 < hi1):
                    pairs.append((i, j))
        return pairs

    def crossing_count(self) -> int:
        return len(self.crossing_pairs())

    def over_under(self, i: int, j: int) -> Tuple[int, int]:
        hi, hj = self.chords[i].height, self.chords[j].height
        if hi == hj:
            raise ValueError(f"chords {i} and {j} cross at equal height")
        return (i, j) if hi > hj else (j, i)

    def crossing_sign(self, i: int, j: int) -> int:
        over, under = self.over_under(i, j)
        tail_o = self.rank[self.chords[over].tail]
        head_o = self.rank[self.chords[over].head]
        tail_u = self.rank[self.chords[under].tail]
        return 1 if _in_ccw_arc(tail_u, tail_o, head_o) else -1

    def writhe(self) -> int:
        return sum(self.crossing_sign(i, j) for i, j in self.crossing_pairs())

    # ------------------------------------------------------------------
    # Tracing
    # ------------------------------------------------------------------
    def _walk(self, start_chord: int, forward: bool) -> Component:
        steps: List[Tuple[int, bool]] = []
        letters: List[Letter] = []
        number, direction = start_chord, forward
        chord = self.chords[number]
        start_point = chord.tail if direction else chord.head
        while True:
            steps.append((number, direction))
            chord = self.chords[number]
            arrival = chord.head if direction else chord.tail
            if arrival[1] == MARK:
                return Component(False, tuple(steps), tuple(letters), start_point, arrival)
            letters.append(self.surface.letter_from(arrival[0]))
            exit_point = self.band_partner(arrival)
            number = self.chord_at[exit_point]
            direction = self.chords[number].tail == exit_point
            if number == start_chord and direction == forward:
                return Component(True, tuple(steps), tuple(letters))

    def components(self) -> List[Component]:
        found: List[Component] = []
        used: set[int] = set()
        for point in self.ordered_points:
            if point[1] != MARK or self.chord_at[point] in used:
                continue
            number = self.chord_at[point]
            component = self._walk(number, self.chords[number].tail == point)
            used.update(step for step, _ in component.steps)
            found.append(component)
        for number in range(len(self.chords)):
            if number in used:
                continue
            component = self._walk(number, True)
            used.update(step for step, _ in component.steps)
            found.append(component)
        return found

    def consistently_oriented(self) -> "TangleDiagram":
        """Reorient every chord along the traversal direction of its component."""

        chords = list(self.chords)
        for component in self.components():
            for number, forward in component.steps:
                if not forward:
                    chords[number] = chords[number].reversed()
        return TangleDiagram(self.surface, self.tracks, tuple(chords))

    def closed_words(self) -> List[CurveWord]:
        return [
            CurveWord.normalize(c.letters) for c in self.components() if c.closed
        ]

    def arc_keys(self) -> List[ArcKey]:
        keys: List[ArcKey] = []
        for component in self.components():
            if component.closed:
                continue
            start, end, letters = component.start, component.end, free_reduce(component.letters)
            assert start is not None and end is not None
            if end < start:
                start, end, letters = end, start, invert(letters)
            keys.append(ArcKey(start, end, letters))
        return sorted(keys, key=lambda k: (k.start, k.end, k.letters))

    # ------------------------------------------------------------------
    # Restructuring
    # ------------------------------------------------------------------
    def restrict(self, chord_numbers: Iterable[int]) -> "TangleDiagram":
        """Keep only the given chords, renumbering the surviving tracks."""

        return _compact(self, [self.chords[n] for n in sorted(set(chord_numbers))])

    def component_diagrams(self) -> List["TangleDiagram"]:
        return [self.restrict(n for n, _ in c.steps) for c in self.components()]

    def parallel(self, copies: int) -> "TangleDiagram":
        """``copies`` parallel pushoffs of every component, side by side."""

        if copies == 1:
            return self
        if copies == 0:
            return TangleDiagram(self.surface, tuple(0 for _ in self.tracks), ())

        def spread(point: Point, index: int) -> Point:
            slot, kind, pos = point
            return slot, kind, pos * copies + index

        chords: List[Chord] = []
        for chord in self.chords:
            for s in range(copies):
                chords.append(
                    Chord(spread(chord.tail, s), spread(chord.head, copies - 1 - s), chord.height)
                )
        tracks = tuple(count * copies for count in self.tracks)
        return TangleDiagram(self.surface, tracks, tuple(chords))

    def remove_uturns(self) -> Tuple["TangleDiagram", int]:
        """Cancel chords that turn back into an adjacent track of the same band end.

        Intended for crossingless drawings. Returns the reduced drawing and the
        number of trivial loops removed.
        """

        diagram, loops = self, 0
        while True:
            step = diagram._one_uturn()
            if step is None:
                return diagram, loops
            diagram, closed = step
            loops += closed

    def _one_uturn(self) -> Optional[Tuple["TangleDiagram", int]]:
        for chord in self.chords:
            p, q = chord.tail, chord.head
            if p[1] != TRACK or q[1] != TRACK or p[0] != q[0] or abs(p[2] - q[2]) != 1:
                continue
            p_far, q_far = self.band_partner(p), self.band_partner(q)
            chord_p = self.chords[self.chord_at[p_far]]
            chord_q = self.chords[self.chord_at[q_far]]
            remaining = [c for c in self.chords if c not in (chord, chord_p, chord_q)]
            if chord_p == chord_q:
                return _compact(self, remaining), 1
            x, y = chord_p.other(p_far), chord_q.other(q_far)
            spliced = Chord(x, y, chord_p.height) if chord_p.head == p_far else Chord(y, x, chord_p.height)
            return _compact(self, remaining + [spliced]), 0
        return None


def _in_ccw_arc(x: int, start: int, end: int) -> bool:
    if start < end:
        return start < x < end
    return x > start or x < end


def _compact(diagram: TangleDiagram, chords: Sequence[Chord]) -> TangleDiagram:
    surface = diagram.surface
    used = {p for chord in chords for p in (chord.tail, chord.head) if p[1] == TRACK}
    mapping: Dict[Point, Point] = {}
    tracks: List[int] = []
    for band, count in zip(surface.bands, diagram.tracks):
        plus, minus = surface.slot(band, 1), surface.slot(band, -1)
        kept = [i for i in range(count) if (plus, TRACK, i) in used]
        new_count = len(kept)
        for new, old in enumerate(kept):
            mapping[(plus, TRACK, old)] = (plus, TRACK, new)
            mapping[(minus, TRACK, count - 1 - old)] = (minus, TRACK, new_count - 1 - new)
        tracks.append(new_count)
    renamed = tuple(
        Chord(mapping.get(c.tail, c.tail), mapping.get(c.head, c.head), c.height) for c in chords
    )
    return TangleDiagram(surface, tuple(tracks), renamed)


def empty_diagram(surface: Surface) -> TangleDiagram:
    return TangleDiagram(surface, tuple(0 for _ in surface.bands), ())


def stack(over: TangleDiagram, under: TangleDiagram) -> TangleDiagram:
    """Place ``over`` above ``under``; their tracks run side by side in each band."""

    surface = over.surface
    plus_shift: Dict[int, Tuple[int, int]] = {}
    for band, m_over, m_under in zip(surface.bands, over.tracks, under.tracks):
        plus_shift[surface.slot(band, 1)] = (0, m_over)
        plus_shift[surface.slot(band, -1)] = (m_under, 0)

    def move(point: Point, upper: bool) -> Point:
        slot, kind, pos = point
        if kind != TRACK:
            return point
        over_offset, under_offset = plus_shift[slot]
        return slot, kind, pos + (over_offset if upper else under_offset)

    base = max((c.height for c in under.chords), default=0) + 1
    low = min((c.height for c in over.chords), default=0)
    chords = [Chord(move(c.tail, False), move(c.head, False), c.height) for c in under.chords]
    chords += [
        Chord(move(c.tail, True), move(c.head, True), c.height - low + base) for c in over.chords
    ]
    tracks = tuple(a + b for a, b in zip(over.tracks, under.tracks))
    return TangleDiagram(surface, tracks, tuple(chords))


def union(diagrams: Sequence[TangleDiagram]) -> TangleDiagram:
    """Stack drawings in order, the first one on top."""

    if not diagrams:
        raise ValueError("nothing to stack")
    result = diagrams[-1]
    for diagram in reversed(diagrams[:-1]):
        result = stack(diagram, result)
    return result
