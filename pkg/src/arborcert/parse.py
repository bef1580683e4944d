"""Recursive-descent parser for rational maps written in the variable z.

Grammar (precedence high to low)::

    atom    := NUMBER | 'z' | '(' expr ')'
    power   := atom ('^' unary)?          # right associative, exponent a constant integer >= 0
    unary   := '-' unary | '+' unary | power
    term    := unary (('*' | '/') unary | <juxtaposed power>)*
    expr    := term (('+' | '-') term)*

Every '/' is ordinary division of rational functions; "1/2z" therefore
means (1/2)*z. '**' is accepted as a synonym for '^'. Numbers may be
integers or decimals (read exactly).
"""

from __future__ import annotations

import re
from fractions import Fraction

from .exact import Poly, RatMap, poly_gcd

_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d*)?|\.\d+)|(\*\*|[-+*/^()])|([A-Za-z_]\w*))")


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class _Frac:
    """A rational function num/den during parsing."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None):
        self.num = num
        self.den = den if den is not None else Poly.const(1)

    def __add__(self, o):
        return _Frac(self.num * o.den + o.num * self.den, self.den * o.den)

    def __sub__(self, o):
        return _Frac(self.num * o.den - o.num * self.den, self.den * o.den)

    def __mul__(self, o):
        return _Frac(self.num * o.num, self.den * o.den)

    def __neg__(self):
        return _Frac(-self.num, self.den)

    def constant_value(self) -> Fraction | None:
        if self.num.is_constant() and self.den.is_constant():
            return self.num.leading / self.den.leading
        g = poly_gcd(self.num, self.den)
        n, d = self.num // g, self.den // g
        if n.is_constant() and d.is_constant():
            return n.leading / d.leading
        return None


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[start]!r}", start)
        num, op, name = m.groups()
        start = m.start(m.lastindex)
        if num is not None:
            tokens.append(("num", num, start))
        elif op is not None:
            tokens.append(("op", "^" if op == "**" else op, start))
        else:
            if name != "z":
                raise ParseError(f"unknown variable {name!r} (only z is allowed)", start)
            tokens.append(("var", name, start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.take()
        if val != value:
            raise ParseError(f"expected {value!r}, found {val or 'end of input'!r}", pos)

    def parse(self) -> _Frac:
        if self.peek()[0] == "end":
            raise ParseError("empty expression", 0)
        value = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {val!r}", pos)
        return value

    def expr(self) -> _Frac:
        value = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def _starts_atom(self) -> bool:
        kind, val, _ = self.peek()
        return kind in ("num", "var") or (kind == "op" and val == "(")

    def term(self) -> _Frac:
        value = self.unary()
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val in ("*", "/"):
                self.take()
                rhs = self.unary()
                if val == "*":
                    value = value * rhs
                else:
                    if rhs.num.is_zero():
                        raise ParseError("division by zero", pos)
                    value = _Frac(value.num * rhs.den, value.den * rhs.num)
            elif self._starts_atom():
                value = value * self.power()
            else:
                return value

    def unary(self) -> _Frac:
        kind, val, _ = self.peek()
        if kind == "op" and val in ("-", "+"):
            self.take()
            inner = self.unary()
            return -inner if val == "-" else inner
        return self.power()

    def power(self) -> _Frac:
        base = self.atom()
        kind, val, pos = self.peek()
        if kind == "op" and val == "^":
            self.take()
            exp_pos = self.peek()[2]
            exponent = self.unary().constant_value()
            if exponent is None or exponent.denominator != 1 or exponent < 0:
                raise ParseError("exponent must be a constant integer >= 0", exp_pos)
            e = int(exponent)
            return _Frac(base.num ** e, base.den ** e)
        return base

    def atom(self) -> _Frac:
        kind, val, pos = self.take()
        if kind == "num":
            return _Frac(Poly.const(Fraction(val)))
        if kind == "var":
            return _Frac(Poly.z())
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        raise ParseError(f"unexpected {val or 'end of input'!r}", pos)


def parse_rational_function(text: str) -> tuple[Poly, Poly]:
    """Parse text into an unreduced (num, den) pair."""
    value = _Parser(text).parse()
    return value.num, value.den


def parse_map(text: str) -> RatMap:
    """Parse a map such as ``"z^2 - 2"`` or ``"(z^2-4z+1)/(2z)"`` into lowest terms."""
    num, den = parse_rational_function(text)
    if den.is_zero():
        raise ParseError("denominator is identically zero", 0)
    if num.is_zero() and den.is_zero():
        raise ParseError("indeterminate 0/0", 0)
    return RatMap.make(num, den)
