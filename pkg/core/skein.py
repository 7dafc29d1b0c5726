"""Kauffman bracket skein algebra engine.

Elements are finite sums of multicurves with coefficients in Q[[h]], h = A + 1,
all known to a common precision. Products stack drawings and resolve every
crossing with the skein relation; trivial loops evaluate to -A^2 - A^-2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Callable, Dict, Iterable, Iterator, List, Mapping, Optional, Tuple

from cachetools import LRUCache

from .coeff import HSeries, LaurentPoly, div_by_valuation, structural_series, to_hseries
from .exceptions import InsufficientPrecision, SurfaceMismatch
from .surface.curves import Multicurve, draw_word
from .surface.diagram import Chord, TangleDiagram, stack
from .surface.model import Surface
from .surface.planar import ChordSystem
from .surface.words import CurveWord, GroupRingElement, Letter, cyclic_reduce

if TYPE_CHECKING:  # pragma: no cover
    from .storage.product_cache import ProductCache

DELTA = LaurentPoly.delta()
A_MINUS_A_INV = LaurentPoly({1: 1, -1: -1})

ProductTable = Dict[Multicurve, LaurentPoly]


def _sort_key(curve: Multicurve) -> Tuple:
    return (
        len(curve.components),
        tuple(w.letters for w in curve.components),
        tuple((a.start, a.end, a.letters) for a in curve.arcs),
    )


def _min_err(*orders: Optional[int]) -> Optional[int]:
    known = [o for o in orders if o is not None]
    return min(known) if known else None


@dataclass(frozen=True, eq=False)
class SkeinElement:
    """Finite sum of basis multicurves with h-series coefficients.

    ``prec`` is the common h-precision of all coefficients (absent keys are
    zero to that precision). ``err_order`` is ``None`` when nothing was
    truncated, otherwise the filtration level containing the unrepresented
    remainder.
    """

    surface: Surface
    terms: Mapping[Multicurve, HSeries]
    prec: int
    err_order: Optional[int] = None
    degree_hint: Optional[int] = field(default=None, compare=False)

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------
    @classmethod
    def build(
        cls,
        surface: Surface,
        terms: Mapping[Multicurve, HSeries],
        prec: int,
        err_order: Optional[int] = None,
        degree_hint: Optional[int] = None,
    ) -> "SkeinElement":
        cleaned: Dict[Multicurve, HSeries] = {}
        for key, value in terms.items():
            if key.surface != surface:
                raise SurfaceMismatch(f"term on {key.surface.name} added to {surface.name}")
            value = value.truncate(prec)
            if value.prec < prec:
                prec = value.prec
        for key, value in terms.items():
            value = value.truncate(prec)
            if not value.is_zero():
                cleaned[key] = value
        ordered = dict(sorted(cleaned.items(), key=lambda item: _sort_key(item[0])))
        return cls(surface, ordered, prec, err_order, degree_hint)

    @classmethod
    def zero(cls, surface: Surface, prec: int) -> "SkeinElement":
        return cls(surface, {}, prec)

    @classmethod
    def scalar(cls, surface: Surface, value: HSeries | Fraction | int, prec: int) -> "SkeinElement":
        series = value if isinstance(value, HSeries) else HSeries.constant(value, prec)
        return cls.build(surface, {Multicurve.empty(surface): series}, min(prec, series.prec))

    @classmethod
    def unit(cls, surface: Surface, prec: int) -> "SkeinElement":
        return cls.scalar(surface, 1, prec)

    @classmethod
    def of(cls, curve: Multicurve, prec: int, coeff: HSeries | Fraction | int = 1) -> "SkeinElement":
        series = coeff if isinstance(coeff, HSeries) else HSeries.constant(coeff, prec)
        return cls.build(curve.surface, {curve: series}, min(prec, series.prec))

    @classmethod
    def from_laurent(cls, surface: Surface, table: Mapping[Multicurve, LaurentPoly], prec: int) -> "SkeinElement":
        return cls.build(surface, {k: _series(p, prec) for k, p in table.items()}, prec)

    # ------------------------------------------------------------------
    # Linear structure
    # ------------------------------------------------------------------
    def items(self) -> Iterator[Tuple[Multicurve, HSeries]]:
        return iter(self.terms.items())

    def coefficient(self, key: Multicurve) -> HSeries:
        return self.terms.get(key, HSeries.zero(self.prec))

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: "SkeinElement") -> None:
        if other.surface != self.surface:
            raise SurfaceMismatch(f"{self.surface.name} vs {other.surface.name}")

    def __add__(self, other: "SkeinElement") -> "SkeinElement":
        self._check(other)
        prec = min(self.prec, other.prec)
        merged: Dict[Multicurve, HSeries] = {}
        for key, value in list(self.items()) + list(other.items()):
            value = value.truncate(prec)
            merged[key] = merged[key] + value if key in merged else value
        hint = None
        if self.degree_hint is not None or other.degree_hint is not None:
            hint = min(_bound(self), _bound(other))
        return SkeinElement.build(
            self.surface, merged, prec, _min_err(self.err_order, other.err_order), hint
        )

    def __neg__(self) -> "SkeinElement":
        return SkeinElement(
            self.surface, {k: -v for k, v in self.items()}, self.prec, self.err_order, self.degree_hint
        )

    def __sub__(self, other: "SkeinElement") -> "SkeinElement":
        return self + (-other)

    def scale(self, factor: HSeries | Fraction | int) -> "SkeinElement":
        if isinstance(factor, HSeries):
            terms = {k: v * factor for k, v in self.items()}
            prec = min([self.prec] + [t.prec for t in terms.values()])
            hint = None if self.degree_hint is None else self.degree_hint + 2 * factor.valuation()
            return SkeinElement.build(self.surface, terms, prec, self.err_order, hint)
        return SkeinElement.build(
            self.surface, {k: v.scale(factor) for k, v in self.items()}, self.prec, self.err_order,
            self.degree_hint if factor else None,
        )

    def truncate(self, prec: int) -> "SkeinElement":
        return SkeinElement.build(self.surface, dict(self.terms), min(prec, self.prec), self.err_order)

    def with_err(self, err_order: Optional[int]) -> "SkeinElement":
        return SkeinElement(
            self.surface, self.terms, self.prec, _min_err(self.err_order, err_order), self.degree_hint
        )

    def with_degree(self, degree: Optional[int]) -> "SkeinElement":
        return SkeinElement(self.surface, self.terms, self.prec, self.err_order, degree)

    def agrees_with(self, other: "SkeinElement") -> bool:
        """Equality of coefficients on the common precision."""

        return (self - other).is_zero()

    def support(self) -> List[CurveWord]:
        seen: Dict[CurveWord, None] = {}
        for key in self.terms:
            for word in key.components:
                seen.setdefault(word, None)
        return list(seen)

    def __repr__(self) -> str:
        if not self.terms:
            body = "0"
        else:
            body = " + ".join(f"({v!r})*{k}" for k, v in self.items())
        tail = "" if self.err_order is None else f" + O(F^{self.err_order})"
        return body + tail

    def to_json(self) -> Dict[str, object]:
        return {
            "surface": self.surface.name,
            "prec": self.prec,
            "err_order": "inf" if self.err_order is None else self.err_order,
            "terms": [{"key": k.key_json(), "coeff": v.to_json()} for k, v in self.items()],
        }


_SERIES_CACHE: LRUCache = LRUCache(maxsize=8192)


def _series(poly: LaurentPoly, prec: int) -> HSeries:
    if prec < 1:
        return HSeries.zero(0)
    key = (poly, prec)
    cached = _SERIES_CACHE.get(key)
    if cached is None:
        cached = to_hseries(poly, prec)
        _SERIES_CACHE[key] = cached
    return cached


def _add_poly(table: ProductTable, key: Multicurve, value: LaurentPoly) -> None:
    if key in table:
        table[key] = table[key] + value
    else:
        table[key] = value


class SkeinAlgebra:
    """Product engine for one surface with memoized multicurve products."""

    def __init__(
        self,
        surface: Surface,
        prec: int = 8,
        memory_entries: int = 4096,
        store: Optional["ProductCache"] = None,
    ) -> None:
        self.surface = surface
        self.prec = prec
        self.store = store
        self._products: LRUCache = LRUCache(maxsize=memory_entries)
        self._disk: LRUCache = LRUCache(maxsize=memory_entries)
        self.stats = {"hits": 0, "misses": 0, "states": 0}

    # ------------------------------------------------------------------
    # Diagram resolution
    # ------------------------------------------------------------------
    def resolve_table(self, diagram: TangleDiagram) -> ProductTable:
        """Expand a drawing in the multicurve basis as Laurent coefficients."""

        rank = diagram.rank
        points = diagram.ordered_points
        system = ChordSystem(
            [(rank[c.tail], rank[c.head]) for c in diagram.chords],
            [c.height for c in diagram.chords],
            len(points),
        )
        seen: Dict[frozenset, Tuple[Multicurve, int]] = {}
        table: ProductTable = {}
        for state in system.states():
            self.stats["states"] += 1
            matching, loops = system.smooth(state)
            signature = frozenset((a, b) for a, b in matching.items() if a < b)
            if signature not in seen:
                chords = tuple(Chord(points[a], points[b], 0) for a, b in sorted(signature))
                seen[signature] = Multicurve.from_diagram(TangleDiagram(diagram.surface, diagram.tracks, chords))
            curve, trivial = seen[signature]
            weight = LaurentPoly.monomial(system.exponent(state)) * DELTA ** (loops + trivial)
            _add_poly(table, curve, weight)
        return {k: v for k, v in table.items() if not v.is_zero()}

    def resolve(self, diagram: TangleDiagram, prec: Optional[int] = None) -> SkeinElement:
        return SkeinElement.from_laurent(self.surface, self.resolve_table(diagram), prec or self.prec)

    # ------------------------------------------------------------------
    # Multicurve products
    # ------------------------------------------------------------------
    def product(self, top: Multicurve, bottom: Multicurve) -> ProductTable:
        """``top`` stacked over ``bottom``, resolved."""

        if top.is_empty:
            return {bottom: LaurentPoly.constant(1)}
        if bottom.is_empty:
            return {top: LaurentPoly.constant(1)}
        key = (top, bottom)
        cached = self._products.get(key)
        if cached is not None:
            self.stats["hits"] += 1
            return cached
        if self.store is not None:
            stored = self.store.load(self.surface, top, bottom)
            if stored is not None:
                self._products[key] = stored
                self.stats["hits"] += 1
                return stored
        self.stats["misses"] += 1
        table = self._compute_product(top, bottom)
        self._products[key] = table
        if self.store is not None:
            self.store.save(self.surface, top, bottom, table)
        return table

    def _compute_product(self, top: Multicurve, bottom: Multicurve) -> ProductTable:
        if not top.arcs and top.component_count > 1:
            first, remainder = _peel(top)
            return self._chain(lambda k: self.product(first, k), self.product(remainder, bottom))
        if not bottom.arcs and bottom.component_count > 1:
            last, remainder = _peel(bottom, last=True)
            return self._chain(lambda k: self.product(k, last), self.product(top, remainder))
        return self.resolve_table(stack(top.drawing(), bottom.drawing()))

    @staticmethod
    def _chain(step: Callable[[Multicurve], ProductTable], partial: ProductTable) -> ProductTable:
        table: ProductTable = {}
        for middle, weight in partial.items():
            for key, value in step(middle).items():
                _add_poly(table, key, weight * value)
        return {k: v for k, v in table.items() if not v.is_zero()}

    # ------------------------------------------------------------------
    # Element operations
    # ------------------------------------------------------------------
    def mul(self, x: SkeinElement, y: SkeinElement) -> SkeinElement:
        if x.surface != y.surface or x.surface != self.surface:
            raise SurfaceMismatch(f"cannot multiply {x.surface.name} by {y.surface.name}")
        prec = min(x.prec, y.prec)
        acc: Dict[Multicurve, HSeries] = {}
        for kx, cx in x.items():
            for ky, cy in y.items():
                coeff = (cx * cy).truncate(prec)
                if coeff.is_zero():
                    continue
                for key, poly in self.product(kx, ky).items():
                    value = coeff * _series(poly, prec)
                    acc[key] = acc[key] + value if key in acc else value
        dx, dy = _bound(x), _bound(y)
        err = _product_err(x, y, dx, dy, 0)
        return SkeinElement.build(self.surface, acc, prec, err, dx + dy)

    def commutator(self, x: SkeinElement, z: SkeinElement) -> SkeinElement:
        return self.mul(x, z) - self.mul(z, x)

    def sigma_action(self, x: SkeinElement, z: SkeinElement) -> SkeinElement:
        """(xz - zx) / (-A + A^-1), losing one order of h-precision."""

        dx, dz = _bound(x), _bound(z)
        err = _product_err(x, z, dx, dz, 2)
        diff = self.commutator(x, z)
        if diff.prec <= 1:
            return SkeinElement.zero(self.surface, 0).with_err(err)
        u, _ = structural_series(max(diff.prec, 2))
        u = u.truncate(diff.prec)
        terms = {k: div_by_valuation(v, u) for k, v in diff.items()}
        hint = _bracket_bound(x, z, dx, dz)
        return SkeinElement.build(self.surface, terms, max(diff.prec - 1, 0), err, hint)

    def bracket(self, x: SkeinElement, y: SkeinElement) -> SkeinElement:
        return self.sigma_action(x, y)

    # ------------------------------------------------------------------
    # Evaluations
    # ------------------------------------------------------------------
    def disk_value(self, curve: Multicurve) -> LaurentPoly:
        """Bracket of the drawing flattened into the sphere, bands pushed outside."""

        if curve.arcs:
            raise SurfaceMismatch("disk evaluation is defined for closed multicurves only")
        cached = self._disk.get(curve)
        if cached is not None:
            return cached
        drawing = curve.drawing()
        rank = drawing.rank
        size = len(rank)
        inner = {}
        for chord in drawing.chords:
            inner[rank[chord.tail]] = rank[chord.head]
            inner[rank[chord.head]] = rank[chord.tail]
        surface = self.surface
        plus_order = sorted(surface.bands, key=lambda b: surface.slot(b, 1))
        ends: List[Tuple[int, int]] = []
        heights: List[int] = []
        for band in surface.bands:
            count = drawing.track_count(band)
            plus, minus = surface.slot(band, 1), surface.slot(band, -1)
            for i in range(count):
                ends.append((rank[(plus, 0, i)], rank[(minus, 0, count - 1 - i)]))
                heights.append(plus_order.index(band))
        system = ChordSystem(ends, heights, size, mirror=True)
        total = LaurentPoly()
        for state in system.states():
            outer, loops = system.smooth(state)
            cycles = _count_cycles(inner, outer)
            total = total + LaurentPoly.monomial(system.exponent(state)) * DELTA ** (loops + cycles)
        self._disk[curve] = total
        return total

    def evaluate_to_disk(self, x: SkeinElement) -> HSeries:
        total = HSeries.zero(x.prec)
        for key, value in x.items():
            total = total + value * _series(self.disk_value(key), x.prec)
        return total

    def bracket_class(
        self,
        word: CurveWord | Multicurve | Iterable[Letter] | GroupRingElement,
        prec: Optional[int] = None,
    ) -> SkeinElement:
        """Representative of <x>: [L_x] + 2 - 3 w(L_x)(A - A^-1), linear in Q[pi]."""

        prec = prec or self.prec
        if isinstance(word, dict):
            total = SkeinElement.zero(self.surface, prec)
            for letters, coeff in sorted(word.items()):
                total = total + self.bracket_class(tuple(letters), prec).scale(coeff)
            return total
        if isinstance(word, Multicurve):
            if word.component_count != 1 or word.arcs:
                raise SurfaceMismatch("bracket classes are taken of single closed curves")
            return SkeinElement.of(word, prec) + SkeinElement.scalar(self.surface, 2, prec)
        letters = word.letters if isinstance(word, CurveWord) else tuple(word)
        letters = cyclic_reduce(letters)
        if not letters:
            return SkeinElement.scalar(self.surface, _series(DELTA + 2, prec), prec)
        drawing = draw_word(self.surface, letters)
        correction = LaurentPoly.constant(2) - A_MINUS_A_INV * (3 * drawing.writhe())
        return self.resolve(drawing, prec) + SkeinElement.scalar(self.surface, _series(correction, prec), prec)


def _peel(curve: Multicurve, last: bool = False) -> Tuple[Multicurve, Multicurve]:
    """Split off the first (or last) closed component, keeping the drawing."""

    drawing = curve.drawing()
    parts = [[n for n, _ in c.steps] for c in drawing.components()]
    index = len(parts) - 1 if last else 0
    single, _ = Multicurve.from_diagram(drawing.restrict(parts[index]))
    rest = [n for i, chords in enumerate(parts) if i != index for n in chords]
    remainder, _ = Multicurve.from_diagram(drawing.restrict(rest))
    return single, remainder


def _count_cycles(first: Dict[int, int], second: Dict[int, int]) -> int:
    seen: set[int] = set()
    cycles = 0
    for start in first:
        if start in seen:
            continue
        cycles += 1
        point = start
        while point not in seen:
            seen.add(point)
            partner = first[point]
            seen.add(partner)
            point = second[partner]
    return cycles


def _bound(x: SkeinElement) -> int:
    from .filtration import degree_lower_bound

    return degree_lower_bound(x)


def _bracket_bound(x: SkeinElement, z: SkeinElement, dx: int, dz: int) -> int:
    from .filtration import bracket_degree_bound

    return bracket_degree_bound(x, z, dx, dz)


def _product_err(x: SkeinElement, y: SkeinElement, dx: int, dy: int, shift: int) -> Optional[int]:
    """Remainder level of a product (shift 0) or bracket (shift 2)."""

    candidates = []
    if x.err_order is not None:
        candidates.append(x.err_order + dy - shift)
    if y.err_order is not None:
        candidates.append(y.err_order + dx - shift)
    if not candidates:
        return None
    return max(min(candidates), 0)


# ----------------------------------------------------------------------
# Module-level API bound to a per-surface default engine
# ----------------------------------------------------------------------
_ALGEBRAS: Dict[Surface, SkeinAlgebra] = {}


def register_algebra(algebra: SkeinAlgebra) -> SkeinAlgebra:
    _ALGEBRAS[algebra.surface] = algebra
    return algebra


def algebra_for(surface: Surface, prec: int = 8) -> SkeinAlgebra:
    algebra = _ALGEBRAS.get(surface)
    if algebra is None:
        algebra = register_algebra(SkeinAlgebra(surface, prec))
    return algebra


def element(curve: Multicurve, prec: int = 8) -> SkeinElement:
    return SkeinElement.of(curve, prec)


def resolve(diagram: TangleDiagram, prec: int = 8) -> SkeinElement:
    return algebra_for(diagram.surface, prec).resolve(diagram, prec)


def mul(x: SkeinElement, y: SkeinElement) -> SkeinElement:
    if x.surface != y.surface:
        raise SurfaceMismatch(f"cannot multiply {x.surface.name} by {y.surface.name}")
    return algebra_for(x.surface).mul(x, y)


def sigma_action(x: SkeinElement, z: SkeinElement) -> SkeinElement:
    if x.surface != z.surface:
        raise SurfaceMismatch(f"{x.surface.name} vs {z.surface.name}")
    return algebra_for(x.surface).sigma_action(x, z)


def bracket(x: SkeinElement, y: SkeinElement) -> SkeinElement:
    return sigma_action(x, y)


def epsilon(x: SkeinElement) -> Fraction:
    """Augmentation: A -> -1 and a k-component multicurve -> (-2)^k."""

    if x.prec == 0 or (x.err_order is not None and x.err_order < 1):
        raise InsufficientPrecision("augmentation needs the h^0 coefficients")
    return sum(
        (value.coefficient(0) * (-2) ** key.component_count for key, value in x.items()),
        Fraction(0),
    )


def evaluate_to_disk(x: SkeinElement) -> HSeries:
    """Linear disk evaluation; an algebra map only when the surface is planar.

    On positive genus the flattened bands change the stacking of products, so
    ``e(xy)`` and ``e(x)e(y)`` differ in general.
    """

    return algebra_for(x.surface).evaluate_to_disk(x)


def bracket_class(surface: Surface, word: object, prec: int = 8) -> SkeinElement:
    return algebra_for(surface, prec).bracket_class(word, prec)  # type: ignore[arg-type]
