"""Free-group words in band generators, conjugacy normal forms and homology classes."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Sequence, Tuple

from ..exceptions import ParseError, UnknownBand

Letter = Tuple[str, int]
Letters = Tuple[Letter, ...]


def invert(letters: Sequence[Letter]) -> Letters:
    return tuple((band, -power) for band, power in reversed(letters))


def free_reduce(letters: Iterable[Letter]) -> Letters:
    stack: list[Letter] = []
    for letter in letters:
        if stack and stack[-1][0] == letter[0] and stack[-1][1] == -letter[1]:
            stack.pop()
        else:
            stack.append(letter)
    return tuple(stack)


def cyclic_reduce(letters: Iterable[Letter]) -> Letters:
    reduced = list(free_reduce(letters))
    while len(reduced) >= 2 and reduced[0][0] == reduced[-1][0] and reduced[0][1] == -reduced[-1][1]:
        reduced = reduced[1:-1]
    return tuple(reduced)


def minimal_rotation(letters: Letters) -> Letters:
    if not letters:
        return letters
    return min(letters[i:] + letters[:i] for i in range(len(letters)))


def parse_letters(text: str) -> Letters:
    """Parse ``"a b^-1 a^-1"``; a token ``x^k`` repeats the letter |k| times."""

    letters: list[Letter] = []
    offset = 0
    for token in text.replace(",", " ").split():
        position = text.find(token, offset)
        offset = position + len(token)
        band, _, power_text = token.partition("^")
        if not band or not (band[0].isalpha() or band[0] == "_"):
            raise ParseError(f"bad letter {token!r}", position)
        try:
            power = int(power_text) if power_text else 1
        except ValueError as exc:
            raise ParseError(f"bad exponent in {token!r}", position) from exc
        if power == 0:
            continue
        letters.extend([(band, 1 if power > 0 else -1)] * abs(power))
    return tuple(letters)


def format_letters(letters: Sequence[Letter]) -> str:
    return " ".join(band if power > 0 else f"{band}^-1" for band, power in letters)


@dataclass(frozen=True, order=True)
class CurveWord:
    """Conjugacy class of a free-group element: cyclically reduced, minimally rotated."""

    letters: Letters = ()

    @classmethod
    def normalize(cls, letters: Iterable[Letter], bands: Iterable[str] | None = None) -> "CurveWord":
        letters = tuple(letters)
        if bands is not None:
            known = set(bands)
            for band, _ in letters:
                if band not in known:
                    raise UnknownBand(f"letter {band!r} is not a band of the surface")
        return cls(minimal_rotation(cyclic_reduce(letters)))

    def inverse(self) -> "CurveWord":
        return CurveWord.normalize(invert(self.letters))

    def unoriented(self) -> "CurveWord":
        return min(self, self.inverse())

    def is_trivial(self) -> bool:
        return not self.letters

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return f"({format_letters(self.letters)})"


def normalize_word(letters: Iterable[Letter], bands: Iterable[str] | None = None) -> CurveWord:
    return CurveWord.normalize(letters, bands)


@dataclass(frozen=True)
class HClass:
    """Rational exponent-sum vector over band generators."""

    entries: Tuple[Tuple[str, Fraction], ...] = ()

    @classmethod
    def from_mapping(cls, values: Mapping[str, Fraction | int]) -> "HClass":
        return cls(tuple(sorted((b, Fraction(v)) for b, v in values.items() if v)))

    def as_dict(self) -> Dict[str, Fraction]:
        return dict(self.entries)

    def coefficient(self, band: str) -> Fraction:
        return self.as_dict().get(band, Fraction(0))

    def __add__(self, other: "HClass") -> "HClass":
        merged = self.as_dict()
        for band, value in other.entries:
            merged[band] = merged.get(band, Fraction(0)) + value
        return HClass.from_mapping(merged)

    def scale(self, factor: Fraction | int) -> "HClass":
        return HClass.from_mapping({b: v * factor for b, v in self.entries})

    def __neg__(self) -> "HClass":
        return self.scale(-1)

    def __sub__(self, other: "HClass") -> "HClass":
        return self + (-other)

    def is_zero(self) -> bool:
        return not self.entries

    def __str__(self) -> str:
        if not self.entries:
            return "0"
        return " + ".join(f"{v}*e_{b}" for b, v in self.entries)


def homology_class(word: CurveWord | Sequence[Letter]) -> HClass:
    letters = word.letters if isinstance(word, CurveWord) else word
    sums: Dict[str, Fraction] = {}
    for band, power in letters:
        sums[band] = sums.get(band, Fraction(0)) + power
    return HClass.from_mapping(sums)


# ----------------------------------------------------------------------
# Group ring Q[pi]: formal combinations of free-reduced words
# ----------------------------------------------------------------------
GroupRingElement = Dict[Letters, Fraction]


def group_ring_element(word: Sequence[Letter]) -> GroupRingElement:
    return {free_reduce(word): Fraction(1)}


def minus_one(word: Sequence[Letter]) -> GroupRingElement:
    """The augmentation-ideal generator ``(w - 1)``."""

    reduced = free_reduce(word)
    if not reduced:
        return {}
    return {reduced: Fraction(1), (): Fraction(-1)}


def group_ring_mul(left: GroupRingElement, right: GroupRingElement) -> GroupRingElement:
    product: GroupRingElement = {}
    for w1, c1 in left.items():
        for w2, c2 in right.items():
            key = free_reduce(w1 + w2)
            product[key] = product.get(key, Fraction(0)) + c1 * c2
    return {k: v for k, v in product.items() if v}


def group_ring_product(factors: Iterable[GroupRingElement]) -> GroupRingElement:
    result: GroupRingElement = {(): Fraction(1)}
    for factor in factors:
        result = group_ring_mul(result, factor)
    return result
