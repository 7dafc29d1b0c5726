"""Exact coefficient arithmetic: Laurent polynomials in A and truncated series in h = A + 1."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Dict, Iterable, Iterator, List, Mapping, Tuple

from .exceptions import ValuationError

Scalar = int | Fraction


def parse_rational(text: str) -> Fraction:
    return Fraction(text)


def format_rational(value: Fraction) -> str:
    return str(Fraction(value))


class LaurentPoly:
    """Element of Q[A, A^-1] stored as exponent -> nonzero coefficient."""

    __slots__ = ("_coeffs", "_hash")

    def __init__(self, coeffs: Mapping[int, Scalar] | None = None) -> None:
        cleaned: Dict[int, Fraction] = {}
        for exponent, value in (coeffs or {}).items():
            value = Fraction(value)
            if value:
                cleaned[int(exponent)] = value
        self._coeffs = cleaned
        self._hash: int | None = None

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------
    @classmethod
    def constant(cls, value: Scalar) -> "LaurentPoly":
        return cls({0: value})

    @classmethod
    def monomial(cls, exponent: int, value: Scalar = 1) -> "LaurentPoly":
        return cls({exponent: value})

    @classmethod
    def delta(cls) -> "LaurentPoly":
        """The trivial-loop value -A^2 - A^-2."""

        return cls({2: -1, -2: -1})

    # ------------------------------------------------------------------
    # Ring structure
    # ------------------------------------------------------------------
    def items(self) -> Iterator[Tuple[int, Fraction]]:
        return iter(sorted(self._coeffs.items()))

    def is_zero(self) -> bool:
        return not self._coeffs

    def coefficient(self, exponent: int) -> Fraction:
        return self._coeffs.get(exponent, Fraction(0))

    def shift(self, exponent: int) -> "LaurentPoly":
        return LaurentPoly({e + exponent: c for e, c in self._coeffs.items()})

    def __add__(self, other: object) -> "LaurentPoly":
        other = _as_laurent(other)
        merged = dict(self._coeffs)
        for exponent, value in other._coeffs.items():
            merged[exponent] = merged.get(exponent, Fraction(0)) + value
        return LaurentPoly(merged)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({e: -c for e, c in self._coeffs.items()})

    def __sub__(self, other: object) -> "LaurentPoly":
        return self + (-_as_laurent(other))

    def __rsub__(self, other: object) -> "LaurentPoly":
        return _as_laurent(other) - self

    def __mul__(self, other: object) -> "LaurentPoly":
        other = _as_laurent(other)
        product: Dict[int, Fraction] = {}
        for e1, c1 in self._coeffs.items():
            for e2, c2 in other._coeffs.items():
                product[e1 + e2] = product.get(e1 + e2, Fraction(0)) + c1 * c2
        return LaurentPoly(product)

    __rmul__ = __mul__

    def __pow__(self, power: int) -> "LaurentPoly":
        if power < 0:
            if len(self._coeffs) != 1:
                raise ValueError("only monomials have Laurent inverses")
            ((exponent, value),) = self._coeffs.items()
            return LaurentPoly({exponent * power: value**power})
        result = LaurentPoly.constant(1)
        for _ in range(power):
            result = result * self
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = LaurentPoly.constant(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._coeffs.items()))
        return self._hash

    def __repr__(self) -> str:
        if not self._coeffs:
            return "0"
        parts = [f"{format_rational(c)}*A^{e}" for e, c in self.items()]
        return " + ".join(parts)

    def to_json(self) -> Dict[str, str]:
        return {str(e): format_rational(c) for e, c in self.items()}

    @classmethod
    def from_json(cls, data: Mapping[str, str]) -> "LaurentPoly":
        return cls({int(e): parse_rational(c) for e, c in data.items()})


def _as_laurent(value: object) -> LaurentPoly:
    if isinstance(value, LaurentPoly):
        return value
    if isinstance(value, (int, Fraction)):
        return LaurentPoly.constant(value)
    raise TypeError(f"cannot use {type(value).__name__} as a Laurent polynomial")


@dataclass(frozen=True)
class HSeries:
    """Power series in h = A + 1 known modulo h^prec.

    ``coeffs`` always has exactly ``prec`` entries.
    """

    coeffs: Tuple[Fraction, ...]
    prec: int

    def __post_init__(self) -> None:
        if self.prec < 0:
            raise ValueError("precision must be non-negative")
        padded = tuple(Fraction(c) for c in self.coeffs[: self.prec])
        padded += (Fraction(0),) * (self.prec - len(padded))
        object.__setattr__(self, "coeffs", padded)

    @classmethod
    def of(cls, values: Iterable[Scalar], prec: int) -> "HSeries":
        return cls(tuple(Fraction(v) for v in values), prec)

    @classmethod
    def zero(cls, prec: int) -> "HSeries":
        return cls((), prec)

    @classmethod
    def constant(cls, value: Scalar, prec: int) -> "HSeries":
        return cls((Fraction(value),), prec)

    @classmethod
    def h_power(cls, power: int, prec: int) -> "HSeries":
        return cls(tuple(Fraction(1 if i == power else 0) for i in range(prec)), prec)

    # ------------------------------------------------------------------
    # Inspection
    # ------------------------------------------------------------------
    def valuation(self) -> int:
        """Index of the first nonzero coefficient, or ``prec`` if none is known."""

        for index, value in enumerate(self.coeffs):
            if value:
                return index
        return self.prec

    def is_zero(self) -> bool:
        return self.valuation() == self.prec

    def coefficient(self, index: int) -> Fraction:
        if index >= self.prec:
            raise ValueError(f"coefficient h^{index} is beyond precision {self.prec}")
        return self.coeffs[index]

    def truncate(self, prec: int) -> "HSeries":
        return HSeries(self.coeffs, min(prec, self.prec))

    def agrees_with(self, other: "HSeries") -> bool:
        """Equality on the common precision."""

        common = min(self.prec, other.prec)
        return self.coeffs[:common] == other.coeffs[:common]

    # ------------------------------------------------------------------
    # Arithmetic
    # ------------------------------------------------------------------
    def __add__(self, other: object) -> "HSeries":
        other = self._coerce(other)
        prec = min(self.prec, other.prec)
        return HSeries(tuple(self.coeffs[i] + other.coeffs[i] for i in range(prec)), prec)

    __radd__ = __add__

    def __neg__(self) -> "HSeries":
        return HSeries(tuple(-c for c in self.coeffs), self.prec)

    def __sub__(self, other: object) -> "HSeries":
        return self + (-self._coerce(other))

    def __rsub__(self, other: object) -> "HSeries":
        return self._coerce(other) - self

    def scale(self, factor: Scalar) -> "HSeries":
        factor = Fraction(factor)
        return HSeries(tuple(c * factor for c in self.coeffs), self.prec)

    def __mul__(self, other: object) -> "HSeries":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        prec = min(self.prec + other.valuation(), other.prec + self.valuation())
        out = [Fraction(0)] * prec
        for i, a in enumerate(self.coeffs):
            if not a or i >= prec:
                continue
            for j, b in enumerate(other.coeffs):
                if i + j >= prec:
                    break
                if b:
                    out[i + j] += a * b
        return HSeries(tuple(out), prec)

    __rmul__ = __mul__

    def shift(self, power: int) -> "HSeries":
        """Multiply by h^power."""

        return HSeries((Fraction(0),) * power + self.coeffs, self.prec + power)

    def inverse(self) -> "HSeries":
        """Inverse of a unit (nonzero constant term)."""

        if not self.prec or not self.coeffs[0]:
            raise ValuationError("series is not a unit")
        out = [Fraction(0)] * self.prec
        out[0] = 1 / self.coeffs[0]
        for n in range(1, self.prec):
            acc = sum((self.coeffs[k] * out[n - k] for k in range(1, n + 1)), Fraction(0))
            out[n] = -acc * out[0]
        return HSeries(tuple(out), self.prec)

    def _coerce(self, other: object) -> "HSeries":
        if isinstance(other, HSeries):
            return other
        if isinstance(other, (int, Fraction)):
            return HSeries.constant(other, self.prec)
        if isinstance(other, LaurentPoly):
            return to_hseries(other, self.prec)
        raise TypeError(f"cannot combine HSeries with {type(other).__name__}")

    def __repr__(self) -> str:
        terms = [f"{format_rational(c)}*h^{i}" for i, c in enumerate(self.coeffs) if c]
        body = " + ".join(terms) if terms else "0"
        return f"{body} + O(h^{self.prec})"

    def to_json(self) -> Dict[str, object]:
        return {"prec": self.prec, "coeffs": [format_rational(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, data: Mapping[str, object]) -> "HSeries":
        coeffs = [parse_rational(str(c)) for c in data["coeffs"]]  # type: ignore[union-attr]
        return cls(tuple(coeffs), int(data["prec"]))  # type: ignore[arg-type]


def eval_epsilon_base(p: LaurentPoly) -> Fraction:
    """Value of ``p`` at A = -1."""

    return sum((c * (-1) ** (e % 2) for e, c in p.items()), Fraction(0))


def to_hseries(p: LaurentPoly, prec: int) -> HSeries:
    """Expand ``p`` in h = A + 1 up to O(h^prec)."""

    if prec < 1:
        raise ValueError("precision must be at least 1")
    out = [Fraction(0)] * prec
    for exponent, value in p.items():
        if exponent >= 0:
            # (h - 1)^e
            for j in range(min(exponent, prec - 1) + 1):
                out[j] += value * comb(exponent, j) * (-1) ** (exponent - j)
        else:
            # (h - 1)^-k = (-1)^k (1 - h)^-k
            k = -exponent
            sign = (-1) ** k
            for j in range(prec):
                out[j] += value * sign * comb(k + j - 1, j)
    return HSeries(tuple(out), prec)


U_POLY = LaurentPoly({1: -1, -1: 1})


def structural_series(prec: int) -> Tuple[HSeries, HSeries]:
    """Return ``(u, log(-A))`` where u = -A + A^-1 and log(-A) = log(1 - h)."""

    if prec < 2:
        raise ValueError("structural series need precision at least 2")
    u = to_hseries(U_POLY, prec)
    log_neg_a = HSeries.of([0] + [Fraction(-1, k) for k in range(1, prec)], prec)
    return u, log_neg_a


def div_by_valuation(a: HSeries, b: HSeries) -> HSeries:
    """Exact quotient a / b, losing ``valuation(b)`` orders of precision."""

    vb = b.valuation()
    if vb >= b.prec:
        raise ValuationError("division by a series that is zero to its precision")
    va = a.valuation()
    if va < vb and va < a.prec:
        raise ValuationError(f"dividend valuation {va} is below divisor valuation {vb}")
    numerator = HSeries(a.coeffs[vb:], max(a.prec - vb, 0))
    denominator = HSeries(b.coeffs[vb:], b.prec - vb)
    if numerator.prec == 0:
        return numerator
    return numerator * denominator.inverse()


def _poly_mul(a: List[Fraction], b: List[Fraction], order: int) -> List[Fraction]:
    out = [Fraction(0)] * (order + 1)
    for i, x in enumerate(a[: order + 1]):
        if not x:
            continue
        for j, y in enumerate(b[: order + 1 - i]):
            out[i + j] += x * y
    return out


def arccosh_sq_series(order: int) -> List[Fraction]:
    """Coefficients ``[g_0, g_1, ..., g_order]`` of (arccosh(1 + t))^2.

    Obtained by reverting cosh(sqrt(q)) - 1 = sum q^n / (2n)!; ``g_0`` is 0.
    """

    if order < 1:
        raise ValueError("order must be at least 1")
    f = [Fraction(0)] + [Fraction(1, factorial(2 * n)) for n in range(1, order + 1)]
    g = [Fraction(0)] * (order + 1)
    g[1] = 1 / f[1]
    for n in range(2, order + 1):
        # coefficient of t^n in sum_{m>=2} f_m g^m, with g known below degree n
        acc = Fraction(0)
        power = _poly_mul(g, g, n)
        for m in range(2, n + 1):
            acc += f[m] * power[n]
            power = _poly_mul(power, g, n)
        g[n] = -acc / f[1]
    return g
