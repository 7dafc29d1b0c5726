"""Completed Lie layer: L(c), exp(sigma(.)), BCH and commutator elements.

All series are truncated under a ``TruncationPolicy``: coefficients are kept
to ``h^N`` and pieces certified in ``F^D`` are dropped into the remainder.
Brackets lose one order of h each, so computations start at the working
precision ``N + depth``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from sympy import Matrix, Rational, zeros

from .coeff import HSeries, arccosh_sq_series, div_by_valuation, structural_series
from .config.models import CertificateConfig, TruncationPolicy
from .exceptions import DegreeError, NotAdmissible, NotEmbeddable, StalledConvergence
from .filtration import (
    AugExpansion,
    SymHH,
    certified_degree,
    degree_lower_bound,
    expand_aug_coordinates,
    intersection_form,
    proj_F2_mod_F3,
)
from .skein import SkeinElement, sigma_action
from .surface.curves import Multicurve, intersection_mu
from .surface.words import HClass
from .utils import console

__all__ = [
    "AdmissibilityReport",
    "C_comm",
    "ExpStep",
    "L_of_curve",
    "L_scalar",
    "TruncationPolicy",
    "bch",
    "check_bch_admissible",
    "exp_sigma",
    "exp_sigma_steps",
    "graded_pieces",
    "truncate_filtration",
    "working_precision",
]


def working_precision(policy: TruncationPolicy) -> int:
    return policy.h_order + policy.depth


# ----------------------------------------------------------------------
# L(c)
# ----------------------------------------------------------------------
@lru_cache(maxsize=32)
def _l_coefficients(prec: int, order: int) -> Tuple[HSeries, Tuple[Fraction, ...], HSeries]:
    """kappa = u / (4 log(-A)), arccosh^2 coefficients and the constant u log(-A)."""

    u, log_neg_a = structural_series(prec + 1)
    kappa = div_by_valuation(u, log_neg_a.scale(4))
    constant = (u * log_neg_a).truncate(prec)
    return kappa.truncate(prec), tuple(arccosh_sq_series(order)), constant


def L_scalar(value: HSeries, prec: int) -> HSeries:
    """L evaluated at a scalar curve value, e.g. the trivial loop -A^2 - A^-2."""

    shifted = value + HSeries.constant(2, value.prec)
    order = max(prec, 1)
    kappa, g, constant = _l_coefficients(prec, order)
    t = shifted.scale(Fraction(-1, 2)).truncate(prec)
    total = HSeries.zero(prec)
    power = HSeries.constant(1, prec)
    for k in range(1, order + 1):
        power = power * t
        total = total + (kappa * power).scale(g[k])
    return total - constant


def L_of_curve(c: Multicurve, policy: Optional[TruncationPolicy] = None, prec: Optional[int] = None) -> SkeinElement:
    """(-A + A^-1)/(4 log(-A)) arccosh(-c/2)^2 - (-A + A^-1) log(-A), in powers of (c + 2).

    Powers ``t^k`` of ``t = -(c + 2)/2`` with ``2k >= D`` are left in the remainder.
    """

    policy = policy or TruncationPolicy()
    if c.component_count != 1 or c.arcs:
        raise NotEmbeddable("L is defined for a single closed curve")
    prec = prec or working_precision(policy)
    top = (policy.filt_cap - 1) // 2
    kappa, g, constant = _l_coefficients(prec, max(top, 1))
    by_copies: Dict[int, HSeries] = {}
    for k in range(1, top + 1):
        base = kappa.scale(g[k] * Fraction(-1, 2) ** k)
        for j in range(k + 1):
            weight = comb(k, j) * 2 ** (k - j)
            by_copies[j] = by_copies.get(j, HSeries.zero(prec)) + base.scale(weight)
    by_copies[0] = by_copies.get(0, HSeries.zero(prec)) - constant
    terms = {c.power(j): series for j, series in by_copies.items()}
    return SkeinElement.build(c.surface, terms, prec, 2 * (top + 1), degree_hint=2)


# ----------------------------------------------------------------------
# Filtration truncation
# ----------------------------------------------------------------------
def graded_pieces(x: SkeinElement) -> Dict[int, SkeinElement]:
    """Split x by the degree of its (c + 2)-monomials."""

    expansion = expand_aug_coordinates(x)
    degrees = sorted({m.degree for m in expansion.terms})
    pieces: Dict[int, SkeinElement] = {}
    for degree in degrees:
        part = AugExpansion(x.surface, expansion.part(degree), x.prec, None, expansion.sources)
        pieces[degree] = part.to_element()
    return pieces


def truncate_filtration(x: SkeinElement, cap: int) -> SkeinElement:
    """Drop monomials of degree >= cap, recording the remainder in F^cap."""

    expansion = expand_aug_coordinates(x)
    if all(m.degree < cap for m in expansion.terms):
        return x
    bound = min(degree_lower_bound(x), cap)
    kept = AugExpansion(
        x.surface,
        {m: c for m, c in expansion.terms.items() if m.degree < cap},
        x.prec,
        x.err_order,
        expansion.sources,
    )
    return kept.to_element().with_err(cap).with_degree(bound)


def certify(x: SkeinElement, policy: TruncationPolicy, config: Optional[CertificateConfig] = None) -> int:
    """Degree bound, lifted by certificates up to the policy cap when allowed."""

    bound = degree_lower_bound(x)
    if bound < policy.filt_cap and policy.certify and not x.is_zero():
        bound = max(bound, certified_degree(x, config, ceiling=policy.filt_cap))
    return bound


# ----------------------------------------------------------------------
# exp(sigma(x))
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class ExpStep:
    """Partial sum after ``index`` terms and the certified degree of the last term."""

    index: int
    partial: SkeinElement
    term_degree: int
    converged: bool


def exp_sigma_steps(
    x: SkeinElement,
    z: SkeinElement,
    policy: Optional[TruncationPolicy] = None,
    config: Optional[CertificateConfig] = None,
) -> Iterator[ExpStep]:
    policy = policy or TruncationPolicy()
    cap = policy.filt_cap
    if x.is_zero():
        yield ExpStep(0, z, 2 * z.prec, True)
        return
    if degree_lower_bound(x) < 2:
        raise DegreeError("exp(sigma(x)) needs x in ker eps")
    total, term = z, z
    for index in range(1, policy.depth + 1):
        term = sigma_action(x, term).scale(Fraction(1, index))
        if term.prec == 0:
            raise StalledConvergence(
                "h-precision exhausted before the series converged", last_degree=0, depth=index
            )
        if term.is_zero():
            yield ExpStep(index, total, 2 * term.prec, True)
            return
        degree = certify(term, policy, config)
        if degree >= cap:
            yield ExpStep(index, total.with_err(cap), degree, True)
            return
        term = truncate_filtration(term, cap)
        total = total + term
        yield ExpStep(index, total, degree, False)


def exp_sigma(
    x: SkeinElement,
    z: SkeinElement,
    policy: Optional[TruncationPolicy] = None,
    config: Optional[CertificateConfig] = None,
) -> SkeinElement:
    """sum_i sigma(x)^i(z) / i!, stopped once a term is certified in F^D."""

    policy = policy or TruncationPolicy()
    last = None
    for step in exp_sigma_steps(x, z, policy, config):
        if step.converged:
            return step.partial
        last = step
    degree = last.term_degree if last is not None else 0
    console.log(f"[yellow]exp(sigma) stalled at F^{degree} after {policy.depth} terms[/yellow]")
    raise StalledConvergence(
        f"exp(sigma) terms stuck at certified degree {degree}", last_degree=degree, depth=policy.depth
    )


# ----------------------------------------------------------------------
# Admissibility
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class AdmissibilityReport:
    admissible: bool
    v1: Tuple[HClass, ...]
    v2: Tuple[HClass, ...]
    reason: str = ""

    def to_json(self) -> Dict[str, object]:
        return {
            "admissible": self.admissible,
            "V1": [str(v) for v in self.v1],
            "V2": [str(v) for v in self.v2],
            "reason": self.reason,
        }


def _sym_matrix(s: SymHH, bands: Sequence[str]) -> Matrix:
    index = {b: i for i, b in enumerate(bands)}
    out = zeros(len(bands), len(bands))
    for (i, j), value in s.entries:
        q = Rational(value.numerator, value.denominator)
        if i == j:
            out[index[i], index[i]] += q
        else:
            out[index[i], index[j]] += q / 2
            out[index[j], index[i]] += q / 2
    return out


def _classes(vectors: Sequence[Matrix], bands: Sequence[str]) -> Tuple[HClass, ...]:
    return tuple(
        HClass.from_mapping({b: Fraction(int(v[i].p), int(v[i].q)) for i, b in enumerate(bands)})
        for v in vectors
    )


def check_bch_admissible(xs: Sequence[SkeinElement]) -> AdmissibilityReport:
    """Find V1 >= V2 in H with every F2/F3 class in V1.V2 and mu(V2, V1) = 0.

    V1 is spanned by the columns of the classes, V2 is its mu-radical inside V1.
    Arguments already in F^3 impose nothing.
    """

    if not xs:
        return AdmissibilityReport(True, (), ())
    surface = xs[0].surface
    bands = list(surface.bands)
    classes: List[Matrix] = []
    for x in xs:
        degree = degree_lower_bound(x)
        if degree < 2:
            return AdmissibilityReport(False, (), (), "an argument is not in ker eps")
        if degree >= 3:
            continue
        classes.append(_sym_matrix(proj_F2_mod_F3(x), bands))
    if not classes:
        return AdmissibilityReport(True, (), (), "all arguments lie in F^3")
    span = Matrix.hstack(*classes).columnspace()
    if not span:
        return AdmissibilityReport(True, (), (), "graded classes vanish")
    basis = Matrix.hstack(*span)
    form = intersection_form(surface)
    omega = Matrix(len(bands), len(bands), lambda i, j: form[(bands[i], bands[j])])
    gram = basis.T * omega * basis
    radical = gram.T.nullspace()
    v1 = _classes(span, bands)
    v2 = _classes([basis * y for y in radical], bands)
    complement = Matrix.hstack(*radical).T.nullspace() if radical else [
        Matrix.eye(basis.shape[1])[:, i] for i in range(basis.shape[1])
    ]
    if not complement:
        return AdmissibilityReport(True, v1, v2)
    quotient = Matrix.hstack(*complement).T
    pseudo = (basis.T * basis).inv() * basis.T
    for matrix in classes:
        inner = pseudo * matrix * pseudo.T
        if any(entry != 0 for entry in quotient * inner * quotient.T):
            return AdmissibilityReport(False, v1, v2, "a graded class is not in V1.V2")
    return AdmissibilityReport(True, v1, v2)


# ----------------------------------------------------------------------
# BCH
# ----------------------------------------------------------------------
@lru_cache(maxsize=None)
def dynkin_coefficient(word: Tuple[int, ...]) -> Fraction:
    """Coefficient of the word in log(e^X e^Y); letters are 0 for X and 1 for Y."""

    size = len(word)
    # ways[i][n]: weighted splittings of word[:i] into n blocks X^r Y^s
    ways: List[Dict[int, Fraction]] = [dict() for _ in range(size + 1)]
    ways[0][0] = Fraction(1)
    for start in range(size):
        if not ways[start]:
            continue
        r = s = 0
        for end in range(start, size):
            if word[end] == 0:
                if s:
                    break
                r += 1
            else:
                s += 1
            weight = Fraction(1, factorial(r) * factorial(s))
            for blocks, value in ways[start].items():
                bucket = ways[end + 1]
                bucket[blocks + 1] = bucket.get(blocks + 1, Fraction(0)) + value * weight
    return sum(
        (Fraction((-1) ** (n - 1), n) * value for n, value in ways[size].items() if n),
        Fraction(0),
    )


def _bch_pair(
    a: SkeinElement,
    b: SkeinElement,
    policy: TruncationPolicy,
    config: Optional[CertificateConfig],
) -> SkeinElement:
    """Dynkin's series with right-nested brackets evaluated level by level.

    A level-m bracket certified in F^D is dropped together with every longer
    word ending in it, since bracketing with elements of ker eps keeps F^D.
    """

    if a.is_zero():
        return b
    if b.is_zero():
        return a
    cap = policy.filt_cap
    args = (a, b)
    total = a + b
    err: Optional[int] = None
    level: Dict[Tuple[int, ...], SkeinElement] = {(0,): a, (1,): b}
    last_degree = min(degree_lower_bound(a), degree_lower_bound(b))
    for size in range(2, policy.depth + 1):
        survivors: Dict[Tuple[int, ...], SkeinElement] = {}
        for suffix, value in level.items():
            for letter in (0, 1):
                if size == 2 and suffix[0] == letter:
                    continue
                nested = sigma_action(args[letter], value)
                if nested.prec == 0:
                    raise StalledConvergence(
                        "h-precision exhausted inside BCH", last_degree=last_degree, depth=size
                    )
                if nested.is_zero():
                    continue
                degree = certify(nested, policy, config)
                if degree >= cap:
                    err = cap
                    continue
                last_degree = degree
                nested = truncate_filtration(nested, cap)
                word = (letter,) + suffix
                survivors[word] = nested
                coefficient = dynkin_coefficient(word) / size
                if coefficient:
                    total = total + nested.scale(coefficient)
        if not survivors:
            return total.with_err(err)
        level = survivors
    console.log(f"[yellow]BCH stalled at F^{last_degree} after depth {policy.depth}[/yellow]")
    raise StalledConvergence(
        f"BCH brackets stuck at certified degree {last_degree}", last_degree=last_degree, depth=policy.depth
    )


def bch(
    args: Sequence[SkeinElement],
    policy: Optional[TruncationPolicy] = None,
    config: Optional[CertificateConfig] = None,
    check: bool = True,
) -> SkeinElement:
    """bch(x1, ..., xk) with exp(sigma(bch(x1..xk))) = exp(sigma(x1)) o ... o exp(sigma(xk))."""

    policy = policy or TruncationPolicy()
    items = [x for x in args if not x.is_zero()]
    if not args:
        raise ValueError("bch needs at least one argument")
    if not items:
        return args[0]
    if check:
        report = check_bch_admissible(items)
        if not report.admissible:
            raise NotAdmissible(report.reason or "no admissible V1, V2")
    result = items[0]
    for item in items[1:]:
        result = _bch_pair(result, item, policy, config)
    return result


def C_comm(
    c1: Multicurve,
    c2: Multicurve,
    policy: Optional[TruncationPolicy] = None,
    config: Optional[CertificateConfig] = None,
) -> SkeinElement:
    """bch(L(c1), L(c2), -L(c1), -L(c2)) computed as bch(exp(sigma(L(c1)))(L(c2)), -L(c2))."""

    policy = policy or TruncationPolicy()
    if intersection_mu(c1, c2) != 0:
        raise NotAdmissible("C(c1, c2) needs algebraically disjoint curves")
    first = L_of_curve(c1, policy)
    second = L_of_curve(c2, policy)
    conjugated = exp_sigma(first, second, policy, config)
    return bch([conjugated, -second], policy, config)
