"""Text format for polynomials and system definitions.

A system file is line oriented::

    field 2
    stream x order 93
    stream y order 84
    update x = y0 + y15 + x24 + y1*y2
    update y = x0 + y6 + x27 + x1*x2
    keystream = x0 + x27 + y0 + y15
    offset 708

Variables are written ``x93`` or ``x(93)``; terms are products of
variables (``^`` raises to a power) with an optional integer coefficient.
``#`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, Iterator, List, NamedTuple, Optional, Sequence, Tuple

from diffcipher.core.field import FieldError, PrimeField

from .diffpoly import DifferenceRing, Poly, Var, VariableError, format_poly
from .system import DiffSystem


class ParseError(ValueError):
    """Raised for malformed input; carries the 1-based line and column."""

    def __init__(self, message: str, line: int = 1, column: int = 1) -> None:
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class _Token(NamedTuple):
    kind: str
    text: str
    column: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<var>[A-Za-z_][A-Za-z_']*?(?:\d+|\(\s*\d+\s*\)))(?![A-Za-z_'(\d])
  | (?P<name>[A-Za-z_][A-Za-z_']*)
  | (?P<num>\d+)
  | (?P<op>[+\-*^=])
    """,
    re.VERBOSE,
)
_VAR_RE = re.compile(r"([A-Za-z_][A-Za-z_']*?)\(?\s*(\d+)\s*\)?$")
_STREAM_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z_']*$")


def _tokenize(text: str, line: int, column_offset: int = 0) -> List[_Token]:
    tokens: List[_Token] = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, column_offset + pos + 1)
        kind = match.lastgroup or ""
        if kind != "ws":
            tokens.append(_Token(kind, match.group(), column_offset + pos + 1))
        pos = match.end()
    return tokens


class _PolyParser:
    def __init__(
        self, ring: DifferenceRing, tokens: Sequence[_Token], line: int, end_column: int
    ) -> None:
        self.ring = ring
        self.tokens = tokens
        self.line = line
        self.end_column = end_column
        self.pos = 0

    def _peek(self) -> Optional[_Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _error(self, message: str, token: Optional[_Token] = None) -> ParseError:
        column = token.column if token is not None else self.end_column
        return ParseError(message, self.line, column)

    def _variable(self, token: _Token) -> Var:
        match = _VAR_RE.match(token.text)
        assert match is not None
        name, clock = match.group(1), int(match.group(2))
        try:
            return self.ring.var(name, clock)
        except VariableError as exc:
            raise self._error(str(exc), token) from exc

    def _factor(self) -> Tuple[int, List[Tuple[Var, int]]]:
        token = self._peek()
        if token is None:
            raise self._error("expected a variable or coefficient")
        self.pos += 1
        if token.kind == "num":
            return int(token.text), []
        if token.kind == "name":
            raise self._error(f"variable {token.text!r} needs a clock, as in {token.text}0", token)
        if token.kind != "var":
            raise self._error(f"unexpected {token.text!r}", token)
        v = self._variable(token)
        exponent = 1
        nxt = self._peek()
        if nxt is not None and nxt.text == "^":
            self.pos += 1
            power = self._peek()
            if power is None or power.kind != "num":
                raise self._error("expected an exponent after '^'", power)
            self.pos += 1
            exponent = int(power.text)
        return 1, [(v, exponent)] if exponent else []

    def _term(self) -> Tuple[int, List[Tuple[Var, int]]]:
        coeff, factors = self._factor()
        while True:
            token = self._peek()
            if token is None or token.text != "*":
                return coeff, factors
            self.pos += 1
            c, more = self._factor()
            coeff *= c
            factors.extend(more)

    def parse(self) -> Poly:
        raw: List[Tuple[int, List[Tuple[Var, int]]]] = []
        sign = 1
        token = self._peek()
        if token is not None and token.text == "-":
            sign = -1
            self.pos += 1
        while True:
            coeff, factors = self._term()
            raw.append((sign * coeff, factors))
            token = self._peek()
            if token is None:
                break
            if token.text not in {"+", "-"}:
                raise self._error(f"unexpected {token.text!r}", token)
            sign = 1 if token.text == "+" else -1
            self.pos += 1
        return self.ring.poly(raw)


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].rstrip()


def parse_polynomial(
    source: str, ring: Optional[DifferenceRing] = None, *, p: int = 2, line: int = 1
) -> Poly:
    """Parses one polynomial.

    Without ``ring`` the streams are taken from the variable names in order
    of first appearance, over ``GF(p)``.
    """
    text = _strip_comment(source)
    tokens = _tokenize(text, line)
    if ring is None:
        names: List[str] = []
        for token in tokens:
            if token.kind == "var":
                match = _VAR_RE.match(token.text)
                assert match is not None
                if match.group(1) not in names:
                    names.append(match.group(1))
        try:
            ring = DifferenceRing(PrimeField(p), tuple(names or ["x"]))
        except FieldError as exc:
            raise ParseError(str(exc), line, 1) from exc
    if not tokens:
        raise ParseError("empty polynomial", line, 1)
    return _PolyParser(ring, tokens, line, len(text) + 1).parse()



def parse_polynomials(source: str, ring: Optional[DifferenceRing] = None, *, p: int = 2) -> List[Poly]:
    """One polynomial per nonblank line, all over one ring.

    Without ``ring`` the streams of every line are collected first.
    """
    rows = [
        (number, text)
        for number, text in enumerate(source.splitlines(), start=1)
        if _strip_comment(text).strip()
    ]
    if ring is None:
        names: List[str] = []
        for number, text in rows:
            for token in _tokenize(_strip_comment(text), number):
                if token.kind == "var":
                    match = _VAR_RE.match(token.text)
                    assert match is not None
                    if match.group(1) not in names:
                        names.append(match.group(1))
        try:
            ring = DifferenceRing(PrimeField(p), tuple(names or ["x"]))
        except FieldError as exc:
            raise ParseError(str(exc), 1, 1) from exc
    return [parse_polynomial(text, ring, line=number) for number, text in rows]


@dataclass(frozen=True)
class SystemDefinition:
    """A parsed system file: the system plus its optional cipher clauses."""

    system: DiffSystem
    keystream: Optional[Poly] = None
    offset: Optional[int] = None
    split: Optional[int] = None
    final: Optional[int] = None

    @property
    def is_stream(self) -> bool:
        return self.keystream is not None

    @property
    def is_block(self) -> bool:
        return self.split is not None


class _Line(NamedTuple):
    number: int
    text: str


def _lines(source: str) -> Iterator[_Line]:
    for number, raw in enumerate(source.splitlines(), start=1):
        text = _strip_comment(raw)
        if text.strip():
            yield _Line(number, text)


def _integer(word: str, line: _Line, what: str) -> int:
    try:
        value = int(word)
    except ValueError as exc:
        raise ParseError(
            f"{what} must be an integer, got {word!r}", line.number, line.text.find(word) + 1
        ) from exc
    if value < 0:
        raise ParseError(f"{what} must be nonnegative", line.number, line.text.find(word) + 1)
    return value


def parse_system(source: str) -> SystemDefinition:
    """Parses and validates a system definition.

    Raises:
        ParseError: For syntax errors, unknown streams, non-prime fields,
            missing or duplicate updates and clocks at or beyond a stream's order.
    """
    p: Optional[int] = None
    orders: Dict[str, int] = {}
    pending: List[Tuple[str, _Line, str, int]] = []
    clauses: Dict[str, int] = {}
    for line in _lines(source):
        words = line.text.split()
        head = words[0]
        column = line.text.find(head) + 1
        if head == "field":
            if len(words) != 2:
                raise ParseError("expected 'field <p>'", line.number, column)
            p = _integer(words[1], line, "field modulus")
        elif head == "stream":
            if len(words) != 4 or words[2] != "order":
                raise ParseError("expected 'stream <name> order <r>'", line.number, column)
            name = words[1]
            if not _STREAM_NAME_RE.match(name) or name in orders:
                raise ParseError(f"invalid or duplicate stream name {name!r}", line.number, column)
            orders[name] = _integer(words[3], line, "order")
        elif head in {"update", "keystream"}:
            lhs, eq, rhs = line.text.partition("=")
            if not eq:
                raise ParseError(f"expected '=' in {head} clause", line.number, len(line.text) + 1)
            target = lhs.split()[1] if head == "update" and len(lhs.split()) == 2 else ""
            if head == "update" and not target:
                raise ParseError("expected 'update <name> = <polynomial>'", line.number, column)
            pending.append((head, line, target, len(lhs) + 1))
        elif head in {"offset", "split", "final"}:
            if len(words) != 2:
                raise ParseError(f"expected '{head} <integer>'", line.number, column)
            clauses[head] = _integer(words[1], line, head)
        else:
            raise ParseError(f"unknown directive {head!r}", line.number, column)

    if p is None:
        raise ParseError("missing 'field' directive", 1, 1)
    if not orders:
        raise ParseError("no streams declared", 1, 1)
    try:
        ring = DifferenceRing(PrimeField(p), tuple(orders))
    except FieldError as exc:
        raise ParseError(str(exc), 1, 1) from exc

    updates: Dict[str, Poly] = {}
    keystream: Optional[Poly] = None
    for head, line, target, column in pending:
        rhs = line.text[column:]
        tokens = _tokenize(rhs, line.number, column)
        if not tokens:
            raise ParseError("empty polynomial", line.number, column + 1)
        poly = _PolyParser(ring, tokens, line.number, len(line.text) + 1).parse()
        for token in tokens:
            if token.kind != "var":
                continue
            match = _VAR_RE.match(token.text)
            assert match is not None
            name, clock = match.group(1), int(match.group(2))
            if clock >= orders[name]:
                raise ParseError(
                    f"{name}{clock} is outside the state of stream {name!r} (order {orders[name]})",
                    line.number,
                    token.column,
                )
        if head == "keystream":
            if keystream is not None:
                raise ParseError("duplicate keystream clause", line.number, 1)
            keystream = poly
            continue
        if target not in orders:
            raise ParseError(f"unknown stream {target!r}", line.number, line.text.find(target) + 1)
        if target in updates:
            raise ParseError(f"duplicate update for stream {target!r}", line.number, 1)
        updates[target] = poly

    missing = [name for name in orders if name not in updates]
    if missing:
        raise ParseError(f"no update for streams {', '.join(missing)}", 1, 1)
    system = DiffSystem(ring, tuple(orders.values()), tuple(updates[name] for name in orders))
    split = clauses.get("split")
    if split is not None and not 0 < split < system.n:
        raise ParseError(f"split {split} outside 0 < m < {system.n}", 1, 1)
    return SystemDefinition(system, keystream, clauses.get("offset"), split, clauses.get("final"))


def parse_text(source: str, kind: str = "system_definition", **kwargs: object) -> object:
    """Dispatches on ``kind``: ``polynomial`` or ``system_definition``."""
    if kind == "polynomial":
        return parse_polynomial(source, **kwargs)  # type: ignore[arg-type]
    if kind == "system_definition":
        return parse_system(source)
    raise ValueError(f"unknown kind {kind!r}")


def format_system(
    system: DiffSystem,
    *,
    keystream: Optional[Poly] = None,
    offset: Optional[int] = None,
    split: Optional[int] = None,
    final: Optional[int] = None,
) -> str:
    """Canonical text of a system; :func:`parse_system` reads it back."""
    lines = [f"field {system.p}"]
    for name, r in zip(system.streams, system.orders):
        lines.append(f"stream {name} order {r}")
    for name, f in zip(system.streams, system.updates):
        lines.append(f"update {name} = {format_poly(f)}")
    if keystream is not None:
        lines.append(f"keystream = {format_poly(keystream)}")
    if offset is not None:
        lines.append(f"offset {offset}")
    if split is not None:
        lines.append(f"split {split}")
    if final is not None:
        lines.append(f"final {final}")
    return "\n".join(lines) + "\n"


def format_definition(definition: SystemDefinition) -> str:
    return format_system(
        definition.system,
        keystream=definition.keystream,
        offset=definition.offset,
        split=definition.split,
        final=definition.final,
    )


__all__ = [
    "ParseError",
    "SystemDefinition",
    "format_definition",
    "format_system",
    "parse_polynomial",
    "parse_polynomials",
    "parse_system",
    "parse_text",
]
