"""Definition files and the ``compute`` expression language."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from core.exceptions import MalformedSpec, ParseError
from core.surface.curves import (
    Multicurve,
    band_core,
    boundary_curve,
    curve_from_word,
    dehn_twist,
    outer_curve,
)
from core.surface.model import LIBRARY_SPECS, Surface, library_surface, make_surface
from core.surface.words import parse_letters


# ----------------------------------------------------------------------
# Definition files
# ----------------------------------------------------------------------
@dataclass
class Definitions:
    surface: Surface
    curves: Dict[str, Multicurve] = field(default_factory=dict)


def _fail(message: str, text: str, line_start: int, token: str = "") -> ParseError:
    offset = text.find(token, line_start) if token else line_start
    return ParseError(message, max(offset, line_start))


def _parse_surface(tokens: List[str]) -> Surface:
    # surface NAME [bands b1 b2 ...] order e1 e2 ... [marked N]
    name = tokens[1]
    marked = 0
    if "marked" in tokens:
        at = tokens.index("marked")
        marked = int(tokens[at + 1])
        tokens = tokens[:at]
    if "order" not in tokens:
        raise MalformedSpec("surface line needs an 'order' clause")
    at = tokens.index("order")
    order = tokens[at + 1 :]
    surface = make_surface(order, marked, name)
    if "bands" in tokens:
        declared = tokens[tokens.index("bands") + 1 : at]
        if sorted(declared) != sorted(surface.bands):
            raise MalformedSpec(f"bands {declared} do not match the order {order}")
    return surface


def _parse_curve(tokens: List[str], surface: Surface, curves: Dict[str, Multicurve]) -> Multicurve:
    kind, args = tokens[2], tokens[3:]
    if kind == "core":
        return band_core(surface, args[0])
    if kind == "boundary":
        return boundary_curve(surface, int(args[0]))
    if kind == "outer":
        return outer_curve(surface, args)
    if kind == "word":
        return curve_from_word(surface, parse_letters(" ".join(args)))
    if kind == "twist":
        c, d = curves[args[0]], curves[args[1]]
        power = int(args[2]) if len(args) > 2 else 1
        return dehn_twist(c, d, power)
    raise MalformedSpec(f"unknown curve construction {kind!r}")


def parse_definitions(text: str) -> Definitions:
    """Parse ``surface`` and ``curve`` lines; ``#`` starts a comment."""

    surface: Optional[Surface] = None
    curves: Dict[str, Multicurve] = {}
    start = 0
    for raw in text.splitlines(keepends=True):
        line_start, start = start, start + len(raw)
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        head = tokens[0]
        try:
            if head == "surface" and len(tokens) >= 2:
                if surface is not None:
                    raise _fail("only one surface per definition file", text, line_start)
                surface = _parse_surface(tokens)
            elif head == "curve" and len(tokens) >= 4:
                if surface is None:
                    raise _fail("curve defined before the surface", text, line_start)
                curves[tokens[1]] = _parse_curve(tokens, surface, curves)
            else:
                raise _fail(f"cannot parse {line!r}", text, line_start, head)
        except KeyError as exc:
            raise _fail(f"unknown curve {exc.args[0]!r}", text, line_start, str(exc.args[0])) from exc
        except (ValueError, IndexError) as exc:
            raise _fail(f"malformed line {line!r}: {exc}", text, line_start) from exc
    if surface is None:
        raise ParseError("definition file declares no surface", 0)
    return Definitions(surface, curves)


def load_definitions(source: str) -> Definitions:
    """A library surface name, or a path to a definition file."""

    if source in LIBRARY_SPECS:
        return Definitions(library_surface(source))
    path = Path(source)
    if not path.exists():
        raise MalformedSpec(f"{source!r} is neither a library surface nor a file")
    return parse_definitions(path.read_text(encoding="utf-8"))


# ----------------------------------------------------------------------
# Expressions
# ----------------------------------------------------------------------
TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_']*)|(?P<op>[-+*(),]))")


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Name:
    name: str
    pos: int


@dataclass(frozen=True)
class Call:
    name: str
    args: Tuple["Node", ...]
    pos: int


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class Scale:
    factor: Fraction
    operand: "Node"


Node = Union[Num, Name, Call, BinOp, Neg, Scale]


def tokenize(text: str) -> List[Tuple[str, str, int]]:
    tokens: List[Tuple[str, str, int]] = []
    position = 0
    while position < len(text):
        if text[position:].strip() == "":
            break
        match = TOKEN.match(text, position)
        if match is None:
            offset = position + len(text[position:]) - len(text[position:].lstrip())
            raise ParseError(f"unexpected character {text[offset]!r}", offset)
        kind = match.lastgroup or "op"
        tokens.append((kind, match.group(kind), match.start(kind)))
        position = match.end()
    tokens.append(("end", "", len(text)))
    return tokens


class ExpressionParser:
    """Recursive descent over ``expr := term (('+' | '-') term)*``."""

    def __init__(self, text: str) -> None:
        self.text = text
        self.tokens = tokenize(text)
        self.index = 0

    def peek(self) -> Tuple[str, str, int]:
        return self.tokens[self.index]

    def take(self, value: Optional[str] = None) -> Tuple[str, str, int]:
        token = self.peek()
        if value is not None and token[1] != value:
            raise ParseError(f"expected {value!r}, found {token[1] or 'end of input'!r}", token[2])
        self.index += 1
        return token

    def parse(self) -> Node:
        node = self.expr()
        kind, value, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {value!r}", pos)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        kind, value, pos = self.peek()
        if value == "-":
            self.take()
            return Neg(self.term())
        if kind == "num":
            self.take()
            number = Fraction(value)
            if self.peek()[1] == "*":
                self.take()
                return Scale(number, self.term())
            return Num(number)
        return self.atom()

    def atom(self) -> Node:
        kind, value, pos = self.take()
        if value == "(":
            node = self.expr()
            self.take(")")
            return node
        if kind != "name":
            raise ParseError(f"unexpected {value or 'end of input'!r}", pos)
        if self.peek()[1] != "(":
            return Name(value, pos)
        self.take("(")
        args: List[Node] = []
        if self.peek()[1] != ")":
            args.append(self.expr())
            while self.peek()[1] == ",":
                self.take()
                args.append(self.expr())
        self.take(")")
        return Call(value, tuple(args), pos)


def parse_expression(text: str) -> Node:
    return ExpressionParser(text).parse()
