"""Evaluate parsed ``compute`` expressions against a skein session."""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Dict, List, Sequence, Union

from core.coeff import HSeries
from core.exceptions import ParseError
from core.filtration import Wedge3
from core.services import SkeinSession
from core.skein import SkeinElement
from core.surface.curves import Multicurve

from .parser import BinOp, Call, Name, Neg, Node, Num, Scale, parse_expression

Value = Union[SkeinElement, Fraction, HSeries, Wedge3, Multicurve]

GENERATOR_KINDS = ("sep", "bp", "comm")


def value_kind(value: Value) -> str:
    if isinstance(value, SkeinElement):
        return "element"
    if isinstance(value, Fraction):
        return "scalar"
    if isinstance(value, HSeries):
        return "series"
    if isinstance(value, Wedge3):
        return "wedge"
    return "curve"


def value_json(value: Value) -> object:
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, Multicurve):
        return value.key_json()
    return value.to_json()


def _pos(node: Node) -> int:
    return getattr(node, "pos", 0)


class Evaluator:
    def __init__(self, session: SkeinSession) -> None:
        self.session = session
        self._calls: Dict[str, Callable[[Call], Value]] = {
            "mul": self._mul,
            "bracket": lambda c: self._binary(c, self.session.bracket),
            "sigma": lambda c: self._binary(c, self.session.sigma),
            "exp_sigma": lambda c: self._binary(c, self.session.exp_sigma),
            "bch": lambda c: self.session.bch([self.element(a) for a in self._arity(c, 1, None)]),
            "L": lambda c: self.session.log(self.curve(self._arity(c, 1, 1)[0])),
            "zeta": self._zeta,
            "eps": lambda c: self.session.eps(self.element(self._arity(c, 1, 1)[0])),
            "disk": lambda c: self.session.disk(self.element(self._arity(c, 1, 1)[0])),
            "tau": lambda c: self.session.tau(self.element(self._arity(c, 1, 1)[0])),
            "twist": self._twist,
        }

    # ------------------------------------------------------------------
    # Coercions

    def element(self, node: Node) -> SkeinElement:
        value = self.evaluate(node)
        if isinstance(value, SkeinElement):
            return value
        if isinstance(value, Multicurve):
            return self.session.element(value)
        if isinstance(value, Fraction):
            return self.session.scalar(value)
        raise ParseError(f"expected a skein element, got a {value_kind(value)}", _pos(node))

    def curve(self, node: Node) -> Multicurve:
        if isinstance(node, Name):
            return self.session.curve(node.name)
        if isinstance(node, Call) and node.name == "twist":
            return self._twist(node)
        raise ParseError("expected a curve name or twist(...)", _pos(node))

    @staticmethod
    def _arity(call: Call, low: int, high: int | None) -> Sequence[Node]:
        count = len(call.args)
        if count < low or (high is not None and count > high):
            expected = str(low) if high == low else f"at least {low}" if high is None else f"{low}..{high}"
            raise ParseError(f"{call.name} takes {expected} arguments, got {count}", call.pos)
        return call.args

    # ------------------------------------------------------------------
    # Calls

    def _binary(self, call: Call, op: Callable[[SkeinElement, SkeinElement], SkeinElement]) -> SkeinElement:
        left, right = self._arity(call, 2, 2)
        return op(self.element(left), self.element(right))

    def _mul(self, call: Call) -> SkeinElement:
        args = self._arity(call, 1, None)
        result = self.element(args[0])
        for node in args[1:]:
            result = self.session.mul(result, self.element(node))
        return result

    def _zeta(self, call: Call) -> SkeinElement:
        args = self._arity(call, 2, 3)
        kind = args[0]
        if not isinstance(kind, Name) or kind.name not in GENERATOR_KINDS:
            raise ParseError(f"zeta kind must be one of {', '.join(GENERATOR_KINDS)}", _pos(kind))
        return self.session.zeta(kind.name, [self.curve(node) for node in args[1:]])

    def _twist(self, call: Call) -> Multicurve:
        args = self._arity(call, 2, 3)
        power = 1
        if len(args) == 3:
            exponent = self.evaluate(args[2])
            if not isinstance(exponent, Fraction) or exponent.denominator != 1:
                raise ParseError("twist power must be an integer", _pos(args[2]))
            power = int(exponent)
        return self.session.twist(self.curve(args[0]), self.curve(args[1]), power)

    # ------------------------------------------------------------------

    def evaluate(self, node: Node) -> Value:
        if isinstance(node, Num):
            return node.value
        if isinstance(node, Name):
            if node.name == "empty":
                return self.session.empty()
            return self.session.curve(node.name)
        if isinstance(node, Call):
            handler = self._calls.get(node.name)
            if handler is None:
                raise ParseError(f"unknown function {node.name!r}", node.pos)
            return handler(node)
        if isinstance(node, Neg):
            return self._negate(node.operand)
        if isinstance(node, Scale):
            operand = self.evaluate(node.operand)
            if isinstance(operand, Fraction):
                return node.factor * operand
            if isinstance(operand, Multicurve):
                return self.session.element(operand).scale(node.factor)
            return operand.scale(node.factor)
        return self._combine(node)

    def _negate(self, node: Node) -> Value:
        value = self.evaluate(node)
        if isinstance(value, Multicurve):
            value = self.session.element(value)
        return -value

    def _combine(self, node: BinOp) -> Value:
        left, right = self.evaluate(node.left), self.evaluate(node.right)
        if isinstance(left, Fraction) and isinstance(right, Fraction):
            return left + right if node.op == "+" else left - right
        if isinstance(left, (HSeries, Wedge3)) or isinstance(right, (HSeries, Wedge3)):
            if type(left) is not type(right):
                raise ParseError("cannot combine values of different kinds", _pos(node.left))
            return left + right if node.op == "+" else left - right  # type: ignore[operator]
        x, y = self._as_element(left), self._as_element(right)
        return x + y if node.op == "+" else x - y

    def _as_element(self, value: Value) -> SkeinElement:
        if isinstance(value, SkeinElement):
            return value
        if isinstance(value, Multicurve):
            return self.session.element(value)
        return self.session.scalar(value)  # type: ignore[arg-type]


def evaluate_expression(session: SkeinSession, text: str) -> Value:
    return Evaluator(session).evaluate(parse_expression(text))


__all__: List[str] = ["Evaluator", "Value", "evaluate_expression", "value_json", "value_kind"]
