"""Disk-with-bands surfaces, curve words, drawings and Dehn twists."""

from .curves import (
    Multicurve,
    arc_from_word,
    band_core,
    boundary_curve,
    canonical_curve,
    crossing_number,
    curve_from_word,
    dehn_twist,
    draw_word,
    intersection_mu,
    marked_points,
    oriented_curve,
    outer_curve,
)
from .diagram import ArcKey, Chord, TangleDiagram, empty_diagram, stack
from .model import LIBRARY_SPECS, Surface, library_surface, make_surface
from .words import (
    CurveWord,
    HClass,
    homology_class,
    minus_one,
    normalize_word,
    parse_letters,
)


def writhe(diagram: TangleDiagram) -> int:
    return diagram.writhe()


__all__ = [
    "ArcKey",
    "Chord",
    "CurveWord",
    "HClass",
    "LIBRARY_SPECS",
    "Multicurve",
    "Surface",
    "TangleDiagram",
    "arc_from_word",
    "band_core",
    "boundary_curve",
    "canonical_curve",
    "crossing_number",
    "curve_from_word",
    "dehn_twist",
    "draw_word",
    "empty_diagram",
    "homology_class",
    "intersection_mu",
    "library_surface",
    "make_surface",
    "marked_points",
    "minus_one",
    "normalize_word",
    "oriented_curve",
    "outer_curve",
    "parse_letters",
    "stack",
    "writhe",
]
