"""Custom exceptions for the skein engine."""

from __future__ import annotations


class SkeinForgeError(Exception):
    """Base error for skein-forge."""


class ValuationError(SkeinForgeError):
    """Raised when a series division would need negative powers of h."""


class MalformedSpec(SkeinForgeError):
    """Raised when a surface band-end list is inconsistent."""


class UnknownBand(SkeinForgeError):
    """Raised when a word uses a letter that is not a band of the surface."""


class NotEmbeddable(SkeinForgeError):
    """Raised when a word cannot be drawn without crossings."""


class SurfaceMismatch(SkeinForgeError):
    """Raised when operands live on different surfaces."""


class InsufficientPrecision(SkeinForgeError):
    """Raised when a value is requested beyond the precision it carries."""


class DegreeError(SkeinForgeError):
    """Raised when an element is not known to lie in the required filtration level."""


class NotInF3(SkeinForgeError):
    """Raised when tau extraction is asked for an element with nonzero F2/F3 class."""


class Inconclusive(SkeinForgeError):
    """Raised when a certificate search finds no witness."""


class StalledConvergence(SkeinForgeError):
    """Raised when a series stops gaining certified filtration degree."""

    def __init__(self, message: str, *, last_degree: int, depth: int) -> None:
        super().__init__(message)
        self.last_degree = last_degree
        self.depth = depth


class NotAdmissible(SkeinForgeError):
    """Raised when BCH arguments fail the admissibility conditions."""


class InvalidPair(SkeinForgeError):
    """Raised when Torelli generator data violates its defining condition."""

    def __init__(self, condition: str) -> None:
        super().__init__(f"invalid generator data: {condition}")
        self.condition = condition


class UnknownRelation(SkeinForgeError):
    """Raised when a relation id is unknown or not defined on the surface."""


class ParseError(SkeinForgeError):
    """Raised when a definition line or expression cannot be parsed."""

    def __init__(self, message: str, position: int = 0) -> None:
        super().__init__(f"{message} (at position {position})")
        self.position = position


class CorruptCache(SkeinForgeError):
    """Raised when a cached product record fails its checksum."""
