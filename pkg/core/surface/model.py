"""Disk-with-bands surface model and boundary tracing."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, List, Sequence, Tuple

from ..exceptions import MalformedSpec
from ..utils import compute_hash
from .words import CurveWord, Letter

BandEnd = Tuple[str, int]

LIBRARY_SPECS: Dict[str, Tuple[str, ...]] = {
    "S11": ("a+", "b+", "a-", "b-"),
    "S04": ("p+", "p-", "q+", "q-", "r+", "r-"),
    "S12": ("a+", "b+", "a-", "b-", "v+", "v-"),
    "S21": ("a1+", "b1+", "a1-", "b1-", "a2+", "b2+", "a2-", "b2-"),
    "S31": ("a1+", "b1+", "a1-", "b1-", "a2+", "b2+", "a2-", "b2-", "a3+", "b3+", "a3-", "b3-"),
}


def _parse_end(token: str) -> BandEnd:
    token = token.strip()
    if len(token) < 2 or token[-1] not in "+-":
        raise MalformedSpec(f"band end {token!r} must end with '+' or '-'")
    return token[:-1], 1 if token[-1] == "+" else -1


@dataclass(frozen=True)
class Surface:
    """A disk with untwisted bands attached along ``ends`` (counterclockwise).

    Slot ``k`` is the k-th band end; gap ``k`` is the boundary arc of the disk
    between slot ``k`` and slot ``k + 1``. Marked points sit in gaps.
    """

    name: str
    ends: Tuple[BandEnd, ...]
    marked_gaps: Tuple[int, ...] = ()
    _slots: Dict[BandEnd, int] = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self) -> None:
        counts: Dict[str, List[int]] = {}
        for label, sign in self.ends:
            counts.setdefault(label, []).append(sign)
        for label, signs in counts.items():
            if sorted(signs) != [-1, 1]:
                raise MalformedSpec(f"band {label!r} must have exactly one '+' and one '-' end")
        size = len(self.ends)
        for gap in self.marked_gaps:
            if size and not 0 <= gap < size:
                raise MalformedSpec(f"marked gap {gap} out of range")
        self._slots.update({end: index for index, end in enumerate(self.ends)})

    # ------------------------------------------------------------------
    # Band bookkeeping
    # ------------------------------------------------------------------
    @cached_property
    def bands(self) -> Tuple[str, ...]:
        seen: List[str] = []
        for label, _ in self.ends:
            if label not in seen:
                seen.append(label)
        return tuple(seen)

    def slot(self, label: str, sign: int) -> int:
        return self._slots[(label, sign)]

    def label_at(self, slot: int) -> str:
        return self.ends[slot][0]

    def sign_at(self, slot: int) -> int:
        return self.ends[slot][1]

    def partner(self, slot: int) -> int:
        label, sign = self.ends[slot]
        return self._slots[(label, -sign)]

    def letter_from(self, slot: int) -> Letter:
        """Letter read when a strand enters the band at ``slot``."""

        label, sign = self.ends[slot]
        return label, sign

    # ------------------------------------------------------------------
    # Topology
    # ------------------------------------------------------------------
    @property
    def euler_characteristic(self) -> int:
        return 1 - len(self.bands)

    @cached_property
    def boundary_cycles(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(trace_boundary(self.ends))

    @property
    def boundary_count(self) -> int:
        return len(self.boundary_cycles)

    @property
    def genus(self) -> int:
        return (2 - self.euler_characteristic - self.boundary_count) // 2

    def boundary_words(self) -> List[Tuple[Letter, ...]]:
        return [self._cycle_letters(self.ends, cycle) for cycle in self.boundary_cycles]

    @staticmethod
    def _cycle_letters(ends: Sequence[BandEnd], cycle: Sequence[int]) -> Tuple[Letter, ...]:
        size = len(ends)
        return tuple(ends[(gap + 1) % size] for gap in cycle)

    def subsurface_boundaries(self, labels: Iterable[str]) -> List[Tuple[Letter, ...]]:
        """Boundary words of the disk plus the bands in ``labels``.

        The last entry is the outer boundary: the cycle through the gap that
        wraps from the last kept end back to the first.
        """

        keep = set(labels)
        ends = [end for end in self.ends if end[0] in keep]
        cycles = trace_boundary(ends)
        wrap = len(ends) - 1
        cycles.sort(key=lambda cycle: wrap in cycle)
        return [self._cycle_letters(ends, cycle) for cycle in cycles]

    def outer_boundary(self, labels: Iterable[str]) -> CurveWord:
        return CurveWord.normalize(self.subsurface_boundaries(labels)[-1])

    @cached_property
    def spec_hash(self) -> str:
        order = ",".join(f"{label}{'+' if sign > 0 else '-'}" for label, sign in self.ends)
        return compute_hash(self.name, order, ",".join(str(g) for g in self.marked_gaps))

    def describe(self) -> Dict[str, object]:
        return {
            "name": self.name,
            "order": [f"{label}{'+' if sign > 0 else '-'}" for label, sign in self.ends],
            "genus": self.genus,
            "boundary": self.boundary_count,
            "marked_points": len(self.marked_gaps),
        }


def trace_boundary(ends: Sequence[BandEnd]) -> List[Tuple[int, ...]]:
    """Cycles of the gap permutation gap k -> partner(k + 1)."""

    size = len(ends)
    if size == 0:
        return [(0,)]
    slots = {end: index for index, end in enumerate(ends)}

    def step(gap: int) -> int:
        label, sign = ends[(gap + 1) % size]
        return slots[(label, -sign)]

    seen: set[int] = set()
    cycles: List[Tuple[int, ...]] = []
    for start in range(size):
        if start in seen:
            continue
        cycle = [start]
        seen.add(start)
        current = step(start)
        while current != start:
            cycle.append(current)
            seen.add(current)
            current = step(current)
        cycles.append(tuple(cycle))
    return cycles


def make_surface(
    order: Sequence[str] | str,
    marked_points: int = 0,
    name: str = "surface",
) -> Surface:
    """Build a surface from a counterclockwise band-end list such as ``a+ b+ a- b-``."""

    tokens = order.split() if isinstance(order, str) else list(order)
    ends = tuple(_parse_end(token) for token in tokens)
    if marked_points < 0:
        raise MalformedSpec("marked point count must be non-negative")
    gap = max(len(ends) - 1, 0)
    return Surface(name=name, ends=ends, marked_gaps=(gap,) * marked_points)


def library_surface(name: str, marked_points: int = 0) -> Surface:
    try:
        spec = LIBRARY_SPECS[name]
    except KeyError as exc:
        raise MalformedSpec(f"unknown library surface {name!r}") from exc
    return make_surface(spec, marked_points, name)
