"""Multicurves with canonical drawings, Dehn twists and intersection numbers."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from ..exceptions import NotEmbeddable, UnknownBand
from .diagram import MARK, TRACK, ArcKey, Chord, Point, TangleDiagram, empty_diagram, stack
from .model import Surface
from .planar import ChordSystem
from .words import CurveWord, HClass, Letter, Letters, cyclic_reduce, free_reduce, homology_class

UNTANGLE_BUDGET = 200_000


@dataclass(frozen=True)
class Multicurve:
    """Basis element of the skein module: closed components plus arcs.

    Identity is the multiset of unoriented component classes (and arc keys);
    the drawing is scaffolding for computation and does not take part in
    equality or hashing.
    """

    surface: Surface
    components: Tuple[CurveWord, ...] = ()
    arcs: Tuple[ArcKey, ...] = ()
    diagram: Optional[TangleDiagram] = field(default=None, compare=False, hash=False, repr=False)

    @classmethod
    def empty(cls, surface: Surface) -> "Multicurve":
        return cls(surface, (), (), empty_diagram(surface))

    @classmethod
    def from_diagram(cls, diagram: TangleDiagram) -> Tuple["Multicurve", int]:
        """Key a crossingless drawing; returns the multicurve and the trivial loop count."""

        reduced, loops = diagram.remove_uturns()
        keep: List[int] = []
        words: List[CurveWord] = []
        for component in reduced.components():
            if component.closed:
                word = CurveWord.normalize(component.letters)
                if word.is_trivial():
                    loops += 1
                    continue
                words.append(word.unoriented())
            keep.extend(number for number, _ in component.steps)
        if len(keep) != len(reduced.chords):
            reduced = reduced.restrict(keep)
        reduced = reduced.consistently_oriented()
        return cls(diagram.surface, tuple(sorted(words)), tuple(reduced.arc_keys()), reduced), loops

    # ------------------------------------------------------------------
    # Views
    # ------------------------------------------------------------------
    @property
    def is_empty(self) -> bool:
        return not self.components and not self.arcs

    @property
    def component_count(self) -> int:
        return len(self.components)

    def drawing(self) -> TangleDiagram:
        if self.diagram is None:
            raise NotEmbeddable("multicurve carries no drawing")
        return self.diagram

    def oriented_words(self) -> List[CurveWord]:
        return [CurveWord.normalize(c.letters) for c in self.drawing().components() if c.closed]

    def homology(self) -> HClass:
        total = HClass()
        for word in self.oriented_words():
            total = total + homology_class(word)
        return total

    def power(self, copies: int) -> "Multicurve":
        if copies == 0:
            return Multicurve.empty(self.surface)
        drawing = self.drawing().parallel(copies)
        return Multicurve(
            self.surface, tuple(sorted(self.components * copies)), self.arcs * copies, drawing
        )

    def split(self) -> List["Multicurve"]:
        """One multicurve per component, drawings restricted accordingly."""

        parts: List[Multicurve] = []
        for sub in self.drawing().component_diagrams():
            part, _ = Multicurve.from_diagram(sub)
            parts.append(part)
        return parts

    def key_json(self) -> Dict[str, object]:
        return {
            "curves": [str(w) for w in self.components],
            "arcs": [str(a) for a in self.arcs],
        }

    def __str__(self) -> str:
        if self.is_empty:
            return "[]"
        parts = [str(w) for w in self.components] + [str(a) for a in self.arcs]
        return "{" + ", ".join(parts) + "}"


# ----------------------------------------------------------------------
# Drawing words
# ----------------------------------------------------------------------
def draw_word(
    surface: Surface,
    letters: Sequence[Letter],
    *,
    closed: bool = True,
    endpoints: Tuple[Point, Point] | None = None,
    orders: Dict[str, Sequence[int]] | None = None,
) -> TangleDiagram:
    """Naive drawing: one new track per letter, earlier chords drawn higher."""

    orders = orders or {}
    created: Dict[str, int] = {}
    slots: List[Tuple[str, int, int]] = []
    for band, power in letters:
        index = created.get(band, 0)
        created[band] = index + 1
        slots.append((band, power, index))
    tracks = tuple(created.get(band, 0) for band in surface.bands)

    def position(band: str, index: int) -> int:
        order = orders.get(band)
        return order[index] if order is not None else index

    entries: List[Point] = []
    exits: List[Point] = []
    for band, power, index in slots:
        count = created[band]
        plus = position(band, index)
        plus_point = (surface.slot(band, 1), TRACK, plus)
        minus_point = (surface.slot(band, -1), TRACK, count - 1 - plus)
        entries.append(plus_point if power > 0 else minus_point)
        exits.append(minus_point if power > 0 else plus_point)

    chords: List[Chord] = []
    size = len(slots)
    if closed:
        for i in range(size):
            chords.append(Chord(exits[i], entries[(i + 1) % size], -i))
    else:
        if endpoints is None:
            raise ValueError("arcs need marked endpoints")
        start, end = endpoints
        path = [start] + [p for pair in zip(entries, exits) for p in pair] + [end]
        for i in range(0, len(path), 2):
            chords.append(Chord(path[i], path[i + 1], -(i // 2)))
    return TangleDiagram(surface, tracks, tuple(chords))


def _crossing_free(chords: Iterable[Chord]) -> bool:
    spans = []
    for chord in chords:
        a, b = sorted((chord.tail, chord.head))
        spans.append((a, b))
    for i, (lo1, hi1) in enumerate(spans):
        for lo2, hi2 in spans[i + 1 :]:
            if (lo1 < lo2 < hi1) != (lo1 < hi2 < hi1):
                return False
    return True


def untangle(
    surface: Surface,
    letters: Sequence[Letter],
    *,
    closed: bool = True,
    endpoints: Tuple[Point, Point] | None = None,
) -> TangleDiagram:
    """Search track orders in each band for a crossingless drawing of the word."""

    counts: Dict[str, int] = {}
    for band, _ in letters:
        counts[band] = counts.get(band, 0) + 1
    bands = [b for b in surface.bands if b in counts]
    budget = [UNTANGLE_BUDGET]

    def fixed_chords(orders: Dict[str, Sequence[int]]) -> List[Chord]:
        full = {b: orders.get(b, tuple(range(counts[b]))) for b in bands}
        drawing = draw_word(surface, letters, closed=closed, endpoints=endpoints, orders=full)
        fixed_slots = {surface.slot(b, s) for b in orders for s in (1, -1)}

        def known(point: Point) -> bool:
            return point[1] == MARK or point[0] in fixed_slots

        return [c for c in drawing.chords if known(c.tail) and known(c.head)]

    def search(depth: int, orders: Dict[str, Sequence[int]]) -> Optional[Dict[str, Sequence[int]]]:
        if depth == len(bands):
            return orders
        band = bands[depth]
        for order in permutations(range(counts[band])):
            budget[0] -= 1
            if budget[0] < 0:
                return None
            trial = dict(orders)
            trial[band] = order
            if _crossing_free(fixed_chords(trial)):
                found = search(depth + 1, trial)
                if found is not None:
                    return found
        return None

    result = search(0, {})
    if result is None:
        raise NotEmbeddable(f"no crossingless drawing found for {letters!r}")
    drawing = draw_word(surface, letters, closed=closed, endpoints=endpoints, orders=result)
    return TangleDiagram(
        surface, drawing.tracks, tuple(Chord(c.tail, c.head, 0) for c in drawing.chords)
    )


def curve_from_word(surface: Surface, letters: Sequence[Letter]) -> Multicurve:
    for band, _ in letters:
        if band not in surface.bands:
            raise UnknownBand(f"letter {band!r} is not a band of {surface.name}")
    reduced = CurveWord.normalize(letters).letters
    if not reduced:
        raise NotEmbeddable("the trivial class is not a basis curve")
    drawing = untangle(surface, reduced)
    curve, loops = Multicurve.from_diagram(drawing)
    if loops or curve.component_count != 1:
        raise NotEmbeddable(f"word {letters!r} does not describe a single simple curve")
    return curve


def arc_from_word(surface: Surface, start: int, end: int, letters: Sequence[Letter]) -> Multicurve:
    """Arc from marked point ``start`` to marked point ``end`` reading ``letters``."""

    if start == end:
        raise NotEmbeddable("arc endpoints must be distinct marked points")
    marks = marked_points(surface)
    drawing = untangle(
        surface, free_reduce(letters), closed=False, endpoints=(marks[start], marks[end])
    )
    curve, _ = Multicurve.from_diagram(drawing)
    return curve


def marked_points(surface: Surface) -> List[Point]:
    seen: Dict[int, int] = {}
    points: List[Point] = []
    for gap in surface.marked_gaps:
        index = seen.get(gap, 0)
        seen[gap] = index + 1
        points.append((gap, MARK, index))
    return points


# ----------------------------------------------------------------------
# Canonical curves
# ----------------------------------------------------------------------
def band_core(surface: Surface, band: str) -> Multicurve:
    return curve_from_word(surface, ((band, 1),))


def boundary_curve(surface: Surface, index: int) -> Multicurve:
    """Boundary-parallel curve; holes are numbered from 1, the outer boundary last."""

    words = surface.subsurface_boundaries(surface.bands)
    if not 1 <= index <= len(words):
        raise NotEmbeddable(f"surface {surface.name} has no boundary component {index}")
    return curve_from_word(surface, words[index - 1])


def outer_curve(surface: Surface, bands: Iterable[str]) -> Multicurve:
    """Outer boundary of the disk plus the given bands."""

    bands = list(bands)
    for band in bands:
        if band not in surface.bands:
            raise UnknownBand(f"{band!r} is not a band of {surface.name}")
    return curve_from_word(surface, surface.subsurface_boundaries(bands)[-1])


def canonical_curve(surface: Surface, kind: str, data: object) -> Multicurve:
    if kind == "band-core":
        return band_core(surface, str(data))
    if kind == "boundary-parallel":
        return boundary_curve(surface, int(data))  # type: ignore[arg-type]
    if kind == "twist-image":
        c, target, power = data  # type: ignore[misc]
        return dehn_twist(c, target, int(power))
    if kind == "outer":
        return outer_curve(surface, data)  # type: ignore[arg-type]
    if kind == "word":
        return curve_from_word(surface, data)  # type: ignore[arg-type]
    raise NotEmbeddable(f"unknown curve construction {kind!r}")


# ----------------------------------------------------------------------
# Twists and intersections
# ----------------------------------------------------------------------
def crossing_number(c: Multicurve, d: Multicurve) -> int:
    """Crossings between the drawings of ``c`` stacked over ``d``."""

    return stack(c.drawing(), d.drawing()).crossing_count()


def dehn_twist(c: Multicurve, d: Multicurve, power: int = 1) -> Multicurve:
    """Image of ``d`` under the ``power``-th twist along the single curve ``c``.

    ``|power|`` times ``n`` parallel copies of ``c`` are stacked over ``d``
    (``n`` crossings per copy) and every crossing is smoothed the same way;
    the resulting staircase is the twisted strand.
    """

    if c.component_count != 1 or c.arcs:
        raise NotEmbeddable("twists are taken along a single closed curve")
    crossings = crossing_number(c, d)
    if power == 0 or crossings == 0:
        return d
    copies = abs(power) * crossings
    big = stack(c.drawing().parallel(copies), d.drawing())
    rank = big.rank
    system = ChordSystem(
        [(rank[ch.tail], rank[ch.head]) for ch in big.chords],
        [ch.height for ch in big.chords],
        len(rank),
    )
    state = (power > 0,) * len(system.crossings)
    matching, loops = system.smooth(state)
    points = big.ordered_points
    # under-diagram chords come first in a stack
    anchors = [big.chords[n].tail for n in range(len(d.drawing().chords))]
    chords: List[Chord] = []
    done: set[int] = set()
    for anchor in anchors:
        r = rank[anchor]
        if r in done:
            continue
        chords.append(Chord(anchor, points[matching[r]], 0))
        done.update((r, matching[r]))
    for r, s in matching.items():
        if r not in done:
            chords.append(Chord(points[r], points[s], 0))
            done.update((r, s))
    twisted = TangleDiagram(c.surface, big.tracks, tuple(chords)).consistently_oriented()
    # loops closed off by the smoothing bound disks in the surface
    result, _ = Multicurve.from_diagram(twisted)
    return result


def intersection_mu(c: Multicurve, d: Multicurve) -> int:
    """Algebraic intersection number from the signed crossings of c stacked over d."""

    return stack(c.drawing(), d.drawing()).writhe()


def reverse(curve: Multicurve) -> Multicurve:
    """Same multicurve with every chord orientation flipped."""

    drawing = curve.drawing()
    flipped = TangleDiagram(drawing.surface, drawing.tracks, tuple(ch.reversed() for ch in drawing.chords))
    return Multicurve(curve.surface, curve.components, curve.arcs, flipped)


def oriented_curve(surface: Surface, letters: Letters) -> Multicurve:
    """Simple curve drawn so that its orientation reads ``letters``."""

    curve = curve_from_word(surface, letters)
    target = CurveWord.normalize(cyclic_reduce(letters))
    if curve.oriented_words()[0] != target:
        curve = reverse(curve)
    return curve
