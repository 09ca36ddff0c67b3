"""Text expressions to graded series, and back.

Grammar (usual precedence, ``^`` binds tightest and takes an integer)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("+" | "-") unary | power
    power  := atom ("^" int | "^" "(" ["-"] int ")")?
    atom   := number | name | name "(" expr ("," expr)* ")" | "(" expr ")"

Products keep the written order; signs come from the multiplication kernel,
so ``theta2*theta1`` and ``-theta1*theta2`` give the same series. Names may
carry trailing primes (``t'``). ``pi`` and ``e`` are constants unless the
chart has coordinates with those names.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .algebra import Chart, GradedSeries, apply_function, series_reciprocal, series_str
from .coeff import CONSTANTS, FUNCTIONS, Smooth, _const
from .errors import DegreeError, DomainError, GradedError, ParseError, ResolutionError

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
                    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*'*)|(?P<op>[-+*/^(),]))")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list:
    out, pos = [], 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[start]!r}", start, text)
        kind = m.lastgroup
        out.append(Token(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    out.append(Token("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, chart: Chart):
        self.text = text
        self.chart = chart
        self.toks = tokenize(text)
        self.i = 0

    def peek(self) -> Token:
        return self.toks[self.i]

    def take(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, op: str) -> Token:
        t = self.take()
        if t.text != op:
            raise ParseError(f"expected {op!r}, found {t.text or 'end of input'!r}", t.pos, self.text)
        return t

    def error(self, msg: str, tok: Token):
        return ParseError(msg, tok.pos, self.text)

    def parse(self) -> GradedSeries:
        if self.peek().kind == "end":
            raise self.error("empty expression", self.peek())
        f = self.expr()
        if self.peek().kind != "end":
            raise self.error(f"unexpected {self.peek().text!r}", self.peek())
        return f

    def expr(self) -> GradedSeries:
        f = self.term()
        while self.peek().text in ("+", "-"):
            op = self.take().text
            g = self.term()
            f = f + g if op == "+" else f - g
        return f

    def term(self) -> GradedSeries:
        f = self.unary()
        while self.peek().text in ("*", "/"):
            tok = self.take()
            g = self.unary()
            if tok.text == "*":
                f = f * g
            else:
                try:
                    f = f * series_reciprocal(g)
                except GradedError as exc:
                    raise self.error(f"cannot divide: {exc}", tok) from None
        return f

    def unary(self) -> GradedSeries:
        if self.peek().text in ("+", "-"):
            op = self.take().text
            f = self.unary()
            return -f if op == "-" else f
        return self.power()

    def power(self) -> GradedSeries:
        f = self.atom()
        if self.peek().text != "^":
            return f
        tok = self.take()
        k = self._exponent()
        try:
            return f ** k
        except GradedError as exc:
            raise self.error(f"cannot raise to power {k}: {exc}", tok) from None

    def _exponent(self) -> int:
        paren = self.peek().text == "("
        if paren:
            self.take()
        sign = 1
        if self.peek().text in ("+", "-"):
            sign = -1 if self.take().text == "-" else 1
        t = self.take()
        if t.kind != "num" or not t.text.isdigit():
            raise self.error("exponent must be an integer", t)
        if paren:
            self.expect(")")
        return sign * int(t.text)

    def atom(self) -> GradedSeries:
        t = self.take()
        ch = self.chart
        if t.kind == "num":
            return ch.constant(Fraction(t.text))
        if t.text == "(":
            f = self.expr()
            self.expect(")")
            return f
        if t.kind == "name":
            if self.peek().text == "(" and not ch.has(t.text):
                return self._call(t)
            if ch.has(t.text):
                return ch.coordinate(t.text)
            if t.text in CONSTANTS:
                return ch.constant(Smooth(_const(CONSTANTS[t.text]), ch.nbase))
            raise ResolutionError(f"unknown name {t.text!r} in chart {ch.name}", t.pos, self.text)
        raise self.error(f"unexpected {t.text or 'end of input'!r}", t)

    def _call(self, name: Token) -> GradedSeries:
        if name.text not in FUNCTIONS:
            raise ResolutionError(f"unknown function {name.text!r}", name.pos, self.text)
        self.expect("(")
        args = [self.expr()]
        while self.peek().text == ",":
            self.take()
            args.append(self.expr())
        self.expect(")")
        try:
            return apply_function(name.text, args)
        except (DegreeError, DomainError) as exc:
            raise ParseError(str(exc), name.pos, self.text) from None


def parse_expression(text: str, chart: Chart) -> GradedSeries:
    """Parse ``text`` into a series on ``chart`` (truncated at its order)."""
    if not isinstance(text, str):
        raise ParseError(f"expression must be a string, got {type(text).__name__}")
    return _Parser(text, chart).parse()


def format_series(f: GradedSeries) -> str:
    """Printable form that :func:`parse_expression` reads back."""
    return series_str(f)
