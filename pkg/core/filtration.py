"""Augmentation filtration: coordinates, certified degrees and graded pieces.

Every multicurve component ``c`` is rewritten as ``(c + 2) - 2``; a monomial
``h^j (c_1 + 2)...(c_p + 2)`` then lies in ``F^{2(p + j)}``. Degree bounds are
always certified lower bounds.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, combinations_with_replacement, product
from math import comb
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from .coeff import HSeries
from .config.models import CertificateConfig
from .exceptions import DegreeError, Inconclusive, InsufficientPrecision, NotEmbeddable, NotInF3
from .skein import SkeinElement, algebra_for
from .surface.curves import Multicurve, band_core, crossing_number, dehn_twist, intersection_mu
from .surface.diagram import ArcKey
from .surface.model import Surface
from .surface.words import (
    CurveWord,
    HClass,
    group_ring_product,
    homology_class,
    minus_one,
)

Pair = Tuple[str, str]
Triple = Tuple[str, str, str]


# ----------------------------------------------------------------------
# Augmentation coordinates
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class AugMonomial:
    factors: Tuple[CurveWord, ...]
    h_power: int
    arcs: Tuple[ArcKey, ...] = ()

    @property
    def degree(self) -> int:
        return 2 * (len(self.factors) + self.h_power)

    def sort_key(self) -> Tuple:
        return (self.degree, self.h_power, tuple(w.letters for w in self.factors), tuple(map(str, self.arcs)))

    def __str__(self) -> str:
        parts = [f"({w}+2)" for w in self.factors] + [str(a) for a in self.arcs]
        if self.h_power:
            parts.insert(0, "h" if self.h_power == 1 else f"h^{self.h_power}")
        return "*".join(parts) or "1"


@dataclass
class AugExpansion:
    """Exact rewrite of an element in the (c + 2) coordinates."""

    surface: Surface
    terms: Dict[AugMonomial, Fraction]
    prec: int
    err_order: Optional[int] = None
    sources: Dict[Tuple[Tuple[CurveWord, ...], Tuple[ArcKey, ...]], Multicurve] = field(default_factory=dict)

    def items(self) -> List[Tuple[AugMonomial, Fraction]]:
        return sorted(self.terms.items(), key=lambda item: item[0].sort_key())

    def raw_degree(self) -> int:
        cap = 2 * self.prec if self.err_order is None else min(2 * self.prec, self.err_order)
        return min([m.degree for m in self.terms] + [cap])

    def part(self, degree: int) -> Dict[AugMonomial, Fraction]:
        return {m: c for m, c in self.terms.items() if m.degree == degree}

    def has_arcs(self) -> bool:
        return any(m.arcs for m in self.terms)

    def to_element(self) -> SkeinElement:
        """Multiply every monomial back out in the multicurve basis."""

        acc: Dict[Multicurve, List[Fraction]] = {}
        for monomial, coeff in self.terms.items():
            source = self.sources[(monomial.factors, monomial.arcs)]
            groups = Counter(monomial.factors)
            words = sorted(groups)
            for choice in product(*(range(groups[w] + 1) for w in words)):
                weight = Fraction(coeff)
                for word, chosen in zip(words, choice):
                    weight *= comb(groups[word], chosen) * 2 ** (groups[word] - chosen)
                key = _sub_multicurve(source, dict(zip(words, choice)))
                row = acc.setdefault(key, [Fraction(0)] * self.prec)
                if monomial.h_power < self.prec:
                    row[monomial.h_power] += weight
        terms = {k: HSeries(tuple(v), self.prec) for k, v in acc.items()}
        return SkeinElement.build(self.surface, terms, self.prec, self.err_order)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*{m}" for m, c in self.items())


def _sub_multicurve(curve: Multicurve, counts: Mapping[CurveWord, int]) -> Multicurve:
    """Arcs of ``curve`` plus the first ``counts[w]`` closed components of class ``w``."""

    drawing = curve.drawing()
    used: Counter = Counter()
    keep: List[int] = []
    for component in drawing.components():
        chords = [n for n, _ in component.steps]
        if not component.closed:
            keep.extend(chords)
            continue
        word = CurveWord.normalize(component.letters).unoriented()
        if used[word] < counts.get(word, 0):
            used[word] += 1
            keep.extend(chords)
    sub, _ = Multicurve.from_diagram(drawing.restrict(keep))
    return sub


def expand_aug_coordinates(x: SkeinElement) -> AugExpansion:
    terms: Dict[AugMonomial, Fraction] = {}
    sources: Dict[Tuple[Tuple[CurveWord, ...], Tuple[ArcKey, ...]], Multicurve] = {}
    for key, series in x.items():
        groups = Counter(key.components)
        words = sorted(groups)
        for choice in product(*(range(groups[w] + 1) for w in words)):
            weight = Fraction(1)
            for word, chosen in zip(words, choice):
                weight *= comb(groups[word], chosen) * (-2) ** (groups[word] - chosen)
            factors = tuple(w for w, chosen in zip(words, choice) for _ in range(chosen))
            sources.setdefault((factors, key.arcs), key)
            for power, value in enumerate(series.coeffs):
                if not value:
                    continue
                monomial = AugMonomial(factors, power, key.arcs)
                terms[monomial] = terms.get(monomial, Fraction(0)) + weight * value
    terms = {m: c for m, c in terms.items() if c}
    return AugExpansion(x.surface, terms, x.prec, x.err_order, sources)


# ----------------------------------------------------------------------
# Graded coordinates
# ----------------------------------------------------------------------
def _pair(i: str, j: str) -> Pair:
    return (i, j) if i <= j else (j, i)


@dataclass(frozen=True)
class SymHH:
    """Element of the symmetric square of H plus a scalar h-coordinate."""

    entries: Tuple[Tuple[Pair, Fraction], ...] = ()
    scalar: Fraction = Fraction(0)

    @classmethod
    def from_mapping(cls, values: Mapping[Pair, Fraction | int], scalar: Fraction | int = 0) -> "SymHH":
        merged: Dict[Pair, Fraction] = {}
        for (i, j), value in values.items():
            key = _pair(i, j)
            merged[key] = merged.get(key, Fraction(0)) + Fraction(value)
        return cls(tuple(sorted((k, v) for k, v in merged.items() if v)), Fraction(scalar))

    @classmethod
    def product(cls, a: HClass, b: HClass) -> "SymHH":
        values: Dict[Pair, Fraction] = {}
        for i, x in a.entries:
            for j, y in b.entries:
                key = _pair(i, j)
                values[key] = values.get(key, Fraction(0)) + x * y
        return cls.from_mapping(values)

    def as_dict(self) -> Dict[Pair, Fraction]:
        return dict(self.entries)

    def __add__(self, other: "SymHH") -> "SymHH":
        values = self.as_dict()
        for key, value in other.entries:
            values[key] = values.get(key, Fraction(0)) + value
        return SymHH.from_mapping(values, self.scalar + other.scalar)

    def scale(self, factor: Fraction | int) -> "SymHH":
        return SymHH.from_mapping({k: v * factor for k, v in self.entries}, self.scalar * factor)

    def __neg__(self) -> "SymHH":
        return self.scale(-1)

    def __sub__(self, other: "SymHH") -> "SymHH":
        return self + (-other)

    def is_zero(self) -> bool:
        return not self.entries and not self.scalar

    def to_json(self) -> Dict[str, object]:
        return {
            "sym": {f"{i}.{j}": str(v) for (i, j), v in self.entries},
            "h": str(self.scalar),
        }

    def __str__(self) -> str:
        parts = [f"{v}*{i}.{j}" for (i, j), v in self.entries]
        if self.scalar:
            parts.append(f"{self.scalar}*h")
        return " + ".join(parts) or "0"


def _sorted_triple(i: str, j: str, k: str) -> Tuple[int, Triple]:
    items = [i, j, k]
    sign = 1
    for p in range(3):
        for q in range(2 - p):
            if items[q] > items[q + 1]:
                items[q], items[q + 1] = items[q + 1], items[q]
                sign = -sign
    return sign, (items[0], items[1], items[2])


@dataclass(frozen=True)
class Wedge3:
    """Alternating 3-tensor over H in the band basis."""

    entries: Tuple[Tuple[Triple, Fraction], ...] = ()

    @classmethod
    def from_mapping(cls, values: Mapping[Triple, Fraction | int]) -> "Wedge3":
        merged: Dict[Triple, Fraction] = {}
        for (i, j, k), value in values.items():
            if len({i, j, k}) < 3:
                continue
            sign, key = _sorted_triple(i, j, k)
            merged[key] = merged.get(key, Fraction(0)) + sign * Fraction(value)
        return cls(tuple(sorted((k, v) for k, v in merged.items() if v)))

    @classmethod
    def wedge(cls, a: HClass, b: HClass, c: HClass) -> "Wedge3":
        values: Dict[Triple, Fraction] = {}
        for i, x in a.entries:
            for j, y in b.entries:
                for k, z in c.entries:
                    values[(i, j, k)] = values.get((i, j, k), Fraction(0)) + x * y * z
        return cls.from_mapping(values)

    @classmethod
    def basis(cls, bands: Iterable[str]) -> List[Triple]:
        return list(combinations(sorted(bands), 3))

    def as_dict(self) -> Dict[Triple, Fraction]:
        return dict(self.entries)

    def __add__(self, other: "Wedge3") -> "Wedge3":
        values = self.as_dict()
        for key, value in other.entries:
            values[key] = values.get(key, Fraction(0)) + value
        return Wedge3.from_mapping(values)

    def scale(self, factor: Fraction | int) -> "Wedge3":
        return Wedge3.from_mapping({k: v * factor for k, v in self.entries})

    def __neg__(self) -> "Wedge3":
        return self.scale(-1)

    def __sub__(self, other: "Wedge3") -> "Wedge3":
        return self + (-other)

    def is_zero(self) -> bool:
        return not self.entries

    def to_json(self) -> Dict[str, str]:
        return {"^".join(k): str(v) for k, v in self.entries}

    def __str__(self) -> str:
        return " + ".join(f"{v}*{'^'.join(k)}" for k, v in self.entries) or "0"


@lru_cache(maxsize=64)
def intersection_form(surface: Surface) -> Dict[Pair, int]:
    """mu(e_i, e_j) on the band-core basis of H."""

    cores = {b: band_core(surface, b) for b in surface.bands}
    form: Dict[Pair, int] = {}
    for i in surface.bands:
        for j in surface.bands:
            form[(i, j)] = 0 if i == j else intersection_mu(cores[i], cores[j])
    return form


def mu(surface: Surface, a: HClass, b: HClass) -> Fraction:
    form = intersection_form(surface)
    return sum((x * y * form[(i, j)] for i, x in a.entries for j, y in b.entries), Fraction(0))


def graded_bracket(surface: Surface, s: SymHH, t: SymHH) -> SymHH:
    """Bracket on F2/F3: [a.b, c.d] = mu(a,c) b.d + mu(a,d) b.c + mu(b,c) a.d + mu(b,d) a.c."""

    form = intersection_form(surface)
    values: Dict[Pair, Fraction] = {}

    def add(pair: Pair, value: Fraction) -> None:
        key = _pair(*pair)
        values[key] = values.get(key, Fraction(0)) + value

    for (a, b), x in s.entries:
        for (c, d), y in t.entries:
            w = x * y
            add((b, d), w * form[(a, c)])
            add((b, c), w * form[(a, d)])
            add((a, d), w * form[(b, c)])
            add((a, c), w * form[(b, d)])
    return SymHH.from_mapping(values)


# ----------------------------------------------------------------------
# Degrees and projections
# ----------------------------------------------------------------------
def _project(surface: Surface, expansion: AugExpansion) -> SymHH:
    values: Dict[Pair, Fraction] = {}
    scalar = Fraction(0)
    for monomial, coeff in expansion.part(2).items():
        if monomial.factors:
            klass = homology_class(monomial.factors[0])
            square = SymHH.product(klass, klass)
            for key, value in square.entries:
                values[key] = values.get(key, Fraction(0)) + coeff * value / 2
        else:
            scalar += coeff
    return SymHH.from_mapping(values, scalar)


def degree_lower_bound(x: SkeinElement) -> int:
    """Certified n with x in F^n, never above the truncation level."""

    cap = 2 * x.prec if x.err_order is None else min(2 * x.prec, x.err_order)
    if x.degree_hint is not None and x.degree_hint >= cap:
        return cap
    if x.is_zero():
        return cap
    expansion = expand_aug_coordinates(x)
    bound = expansion.raw_degree()
    if bound == 2 and cap > 2 and x.prec >= 2 and not expansion.has_arcs():
        if _project(x.surface, expansion).is_zero():
            bound = 3
    if x.degree_hint is not None:
        bound = max(bound, x.degree_hint)
    return min(bound, cap)


def proj_F2_mod_F3(x: SkeinElement) -> SymHH:
    if x.prec < 2 or (x.err_order is not None and x.err_order <= 2):
        raise InsufficientPrecision("the F2/F3 class needs the h^1 coefficients and a remainder in F^3")
    if x.degree_hint is not None and x.degree_hint >= 3:
        return SymHH()
    expansion = expand_aug_coordinates(x)
    if expansion.has_arcs():
        raise DegreeError("graded projections are defined on closed elements only")
    if expansion.raw_degree() < 2:
        raise DegreeError(f"element is not in ker eps: {expansion}")
    return _project(x.surface, expansion)


def bracket_degree_bound(x: SkeinElement, y: SkeinElement, dx: Optional[int] = None, dy: Optional[int] = None) -> int:
    """Certified degree of [x, y]: dx + dy - 2, lifted to 3 when the graded bracket vanishes."""

    dx = degree_lower_bound(x) if dx is None else dx
    dy = degree_lower_bound(y) if dy is None else dy
    bound = max(dx + dy - 2, 0)
    if dx == 2 and dy == 2:
        try:
            if graded_bracket(x.surface, proj_F2_mod_F3(x), proj_F2_mod_F3(y)).is_zero():
                bound = 3
        except (DegreeError, InsufficientPrecision):
            pass
    return bound


# ----------------------------------------------------------------------
# Lambda and rho
# ----------------------------------------------------------------------
def _core_word(band: str) -> Tuple[Tuple[str, int], ...]:
    return ((band, 1),)


def lambda_term(surface: Surface, triple: Triple, prec: int = 8) -> SkeinElement:
    """<(a - 1)(b - 1)(c - 1)> for three band generators."""

    ring = group_ring_product(minus_one(_core_word(b)) for b in triple)
    return algebra_for(surface, prec).bracket_class(ring, prec)


def lambda_eval(w: Wedge3, surface: Surface, prec: int = 8) -> SkeinElement:
    total = SkeinElement.zero(surface, prec)
    for triple, coeff in w.entries:
        total = total + lambda_term(surface, triple, prec).scale(coeff)
    return total


def rho_eval(s: SymHH, surface: Surface, prec: int = 8) -> SkeinElement:
    algebra = algebra_for(surface, prec)
    total = SkeinElement.zero(surface, prec)
    for (i, j), coeff in s.entries:
        ring = group_ring_product([minus_one(_core_word(i)), minus_one(_core_word(j))])
        total = total + algebra.bracket_class(ring, prec).scale(coeff)
    if s.scalar:
        total = total + SkeinElement.scalar(surface, HSeries.h_power(1, prec).scale(s.scalar), prec)
    return total


# ----------------------------------------------------------------------
# (ker eps)^k membership certificates
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class CertificateTerm:
    coefficient: Fraction
    h_power: int
    factors: Tuple[str, ...]

    def __str__(self) -> str:
        parts = [f"h^{self.h_power}"] if self.h_power else []
        parts += [f"[{label}]" for label in self.factors]
        return f"{self.coefficient}*" + ("*".join(parts) or "1")


@dataclass(frozen=True)
class Certificate:
    """Explicit decomposition of an element into k-fold products of ker eps generators."""

    power: int
    prec: int
    terms: Tuple[CertificateTerm, ...]
    generators: Tuple[Tuple[str, str], ...]
    extras: Tuple[Tuple[str, Fraction], ...] = ()

    def extra(self, label: str) -> Fraction:
        return dict(self.extras).get(label, Fraction(0))

    def to_json(self) -> Dict[str, object]:
        return {
            "power": self.power,
            "prec": self.prec,
            "generators": {label: text for label, text in self.generators},
            "terms": [
                {"coeff": str(t.coefficient), "h": t.h_power, "factors": list(t.factors)} for t in self.terms
            ],
            "extras": {label: str(value) for label, value in self.extras},
        }


@dataclass(frozen=True)
class Failure:
    """No witness within the generator list; inconclusive, not a disproof."""

    reason: str

    def __bool__(self) -> bool:
        return False


CertificateResult = Union[Certificate, Failure]


def _closed_parts(elements: Iterable[SkeinElement]) -> Iterable[Multicurve]:
    for x in elements:
        for key in x.terms:
            if key.is_empty or key.arcs:
                continue
            for part in key.split():
                if part.component_count == 1 and not part.arcs:
                    yield part


def certificate_generators(
    elements: Sequence[SkeinElement], config: Optional[CertificateConfig] = None
) -> List[Tuple[str, Multicurve]]:
    """Support curves, band cores and their twist images, in a fixed order."""

    config = config or CertificateConfig()
    surface = elements[0].surface
    found: Dict[CurveWord, Multicurve] = {}
    for curve in list(_closed_parts(elements)) + [band_core(surface, b) for b in surface.bands]:
        found.setdefault(curve.components[0], curve)
    base = list(found.values())
    frontier = list(base)
    for _ in range(config.twist_depth):
        fresh: List[Multicurve] = []
        for c in base:
            for d in frontier:
                if len(found) >= config.max_generators or crossing_number(c, d) == 0:
                    continue
                for power in (1, -1):
                    try:
                        image = dehn_twist(c, d, power)
                    except NotEmbeddable:
                        continue
                    if image.component_count == 1 and image.components[0] not in found:
                        found[image.components[0]] = image
                        fresh.append(image)
        frontier = fresh
    curves = list(found.values())[: config.max_generators]
    return [(f"g{index}", curve) for index, curve in enumerate(curves)]


class _Rows:
    def __init__(self) -> None:
        self.index: Dict[Tuple[Multicurve, int], int] = {}

    def vector(self, element: SkeinElement, shift: int, prec: int) -> Dict[int, Fraction]:
        out: Dict[int, Fraction] = {}
        for key, series in element.items():
            for power, value in enumerate(series.coeffs):
                if not value or power + shift >= prec:
                    continue
                row = self.index.setdefault((key, power + shift), len(self.index))
                out[row] = value
        return out


def _solve(columns: List[Dict[int, Fraction]], target: Dict[int, Fraction], rows: int) -> Optional[List[Fraction]]:
    n = len(columns)
    data: Dict[int, Dict[int, object]] = {}
    for j, column in enumerate(columns):
        for i, value in column.items():
            data.setdefault(i, {})[j] = QQ(value.numerator, value.denominator)
    for i, value in target.items():
        data.setdefault(i, {})[n] = QQ(value.numerator, value.denominator)
    matrix = DomainMatrix(data, (max(rows, 1), n + 1), QQ)
    reduced, pivots = matrix.rref()
    if n in pivots:
        return None
    entries = reduced.to_sparse().rep
    solution = [Fraction(0)] * n
    for row, column in enumerate(pivots):
        value = QQ.to_sympy(entries.get(row, {}).get(n, QQ.zero))
        solution[column] = Fraction(int(value.p), int(value.q))
    return solution


def membership_certificate(
    x: SkeinElement,
    k: int,
    config: Optional[CertificateConfig] = None,
    extras: Optional[Mapping[str, SkeinElement]] = None,
) -> CertificateResult:
    """Search x = sum c h^j g_1...g_r (+ sum w_t extras) with r + j >= k over Q.

    Generators are g = [c] + 2 for the curves returned by ``certificate_generators``
    together with h. Ordered products are used for r <= 2, sorted ones above.
    """

    config = config or CertificateConfig()
    extras = dict(extras or {})
    prec = x.prec
    if x.err_order is not None and x.err_order < 2 * k:
        return Failure(f"remainder only known in F^{x.err_order}")
    if any(key.arcs for key in x.terms):
        return Failure("certificates are searched for closed elements only")
    if x.is_zero() and not extras:
        return Certificate(k, prec, (), ())
    surface = x.surface
    algebra = algebra_for(surface, prec)
    generators = certificate_generators([x, *extras.values()], config)
    elements = [SkeinElement.of(curve, prec) + SkeinElement.scalar(surface, 2, prec) for _, curve in generators]

    rows = _Rows()
    target = rows.vector(x, 0, prec)
    columns: List[Dict[int, Fraction]] = []
    labels: List[Tuple[int, Tuple[int, ...]]] = []
    products: Dict[Tuple[int, ...], SkeinElement] = {(): SkeinElement.unit(surface, prec)}

    def product_of(combo: Tuple[int, ...]) -> SkeinElement:
        if combo not in products:
            products[combo] = algebra.mul(product_of(combo[:-1]), elements[combo[-1]])
        return products[combo]

    n = len(elements)
    for r in range(k + 1):
        if r == 0:
            combos: Iterable[Tuple[int, ...]] = [()]
        elif r <= 2:
            combos = product(range(n), repeat=r)
        else:
            combos = combinations_with_replacement(range(n), r)
        for combo in combos:
            value = product_of(tuple(combo))
            for shift in range(k - r, prec):
                column = rows.vector(value, shift, prec)
                if column:
                    columns.append(column)
                    labels.append((shift, tuple(combo)))
    extra_labels = sorted(extras)
    for label in extra_labels:
        columns.append(rows.vector(extras[label], 0, prec))
    solution = _solve(columns, target, len(rows.index))
    if solution is None:
        return Failure(f"no decomposition over {n} generators at power {k}")
    terms = tuple(
        CertificateTerm(value, shift, tuple(generators[i][0] for i in combo))
        for value, (shift, combo) in zip(solution, labels)
        if value
    )
    found = tuple(
        (label, value) for label, value in zip(extra_labels, solution[len(labels):]) if value
    )
    described = tuple((label, str(curve)) for label, curve in generators)
    return Certificate(k, prec, terms, described, found)


def certified_degree(x: SkeinElement, config: Optional[CertificateConfig] = None, ceiling: Optional[int] = None) -> int:
    """Degree bound lifted through (ker eps)^k certificates where they exist."""

    config = config or CertificateConfig()
    bound = degree_lower_bound(x)
    ceiling = ceiling if ceiling is not None else 2 * config.max_factors
    for k in range(2, config.max_factors + 1):
        if 2 * k <= bound:
            continue
        if 2 * k > ceiling:
            break
        if not membership_certificate(x, k, config):
            break
        bound = 2 * k
    cap = 2 * x.prec if x.err_order is None else min(2 * x.prec, x.err_order)
    return min(bound, cap)


def tau_extract(x: SkeinElement, config: Optional[CertificateConfig] = None) -> Wedge3:
    """The Wedge3 class w with x - lambda(w) in (ker eps)^2."""

    if degree_lower_bound(x) >= 4:
        return Wedge3()
    try:
        graded = proj_F2_mod_F3(x)
    except DegreeError as exc:
        raise NotInF3(str(exc)) from exc
    if not graded.is_zero():
        raise NotInF3(f"F2/F3 class is {graded}")
    triples = Wedge3.basis(x.surface.bands)
    extras = {"^".join(t): lambda_term(x.surface, t, x.prec) for t in triples}
    result = membership_certificate(x, 2, config, extras)
    if isinstance(result, Failure):
        raise Inconclusive(result.reason)
    return Wedge3.from_mapping({t: result.extra("^".join(t)) for t in triples})
