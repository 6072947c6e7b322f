"""Recursive-descent parser for the formula language.

Precedence is ``!`` over ``&&`` over ``||``; a quantifier body extends as
far right as possible.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from ..errors import SacksLabError
from .ast import COMPARISONS, Add, And, CodeOut, Cmp, Formula, Not, Num, Or, Param, Quant, Term, Var


class ParseError(SacksLabError, ValueError):
    def __init__(self, position: int, expected: frozenset[str], found: str):
        self.position = position
        self.expected = expected
        self.found = found
        super().__init__(f"at position {position}: expected {' or '.join(sorted(expected))}, found {found}")


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "id", "code", "param", "kw", "sym", "end"
    text: str
    pos: int


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<id>[A-Za-z_][A-Za-z0-9_]*)|(?P<sym>&&|\|\||!=|<=|[()<=!.+]))")
_KEYWORDS = {"forall", "exists"}
_INDEXED = re.compile(r"([vw])(\d+)$")


def tokenize(text: str) -> list[Token]:
    tokens, pos = [], 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos == len(text):
            tokens.append(Token("end", "end of input", pos))
            return tokens
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(pos, frozenset({"a token"}), repr(text[pos]))
        start = m.start(m.lastgroup)
        word = m.group(m.lastgroup)
        kind = m.lastgroup
        if kind == "id":
            if word in _KEYWORDS:
                kind = "kw"
            elif (ix := _INDEXED.match(word)):
                kind = "code" if ix.group(1) == "v" else "param"
        tokens.append(Token(kind, word, start))
        pos = m.end()


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, expected: set[str]) -> ParseError:
        t = self.tok
        found = t.text if t.kind == "end" else repr(t.text)
        return ParseError(t.pos, frozenset(expected), found)

    def accept(self, text: str) -> bool:
        if self.tok.kind in ("sym", "kw") and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> None:
        if not self.accept(text):
            raise self.error({repr(text)})

    def number(self) -> int:
        if self.tok.kind != "num":
            raise self.error({"number"})
        value = int(self.tok.text)
        self.i += 1
        return value

    def ident(self) -> str:
        if self.tok.kind != "id":
            raise self.error({"identifier"})
        name = self.tok.text
        self.i += 1
        return name

    def formula(self) -> Formula:
        left = self.conjunction()
        while self.accept("||"):
            left = Or(left, self.conjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.unary()
        while self.accept("&&"):
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        if self.accept("!"):
            return Not(self.unary())
        return self.atom()

    def atom(self) -> Formula:
        t = self.tok
        if t.kind == "kw":
            self.i += 1
            var = self.ident()
            self.expect("<")
            bound = self.bound()
            self.expect(".")
            return Quant(t.text, var, bound, self.formula())
        if self.accept("("):
            inner = self.formula()
            self.expect(")")
            return inner
        if t.kind in ("num", "id", "code", "param"):
            left = self.term()
            if self.tok.kind == "sym" and self.tok.text in COMPARISONS:
                op = self.tok.text
                self.i += 1
                return Cmp(op, left, self.term())
            raise self.error(set(map(repr, COMPARISONS)) | {"'+'"})
        raise self.error({"'forall'", "'exists'", "'('", "'!'", "term"})

    def bound(self) -> Term:
        if self.tok.kind == "num":
            return Num(self.number())
        if self.tok.kind != "id":
            raise self.error({"number", "identifier"})
        out: Term = Var(self.ident())
        while self.accept("+"):
            out = Add(out, self.number())
        return out

    def term(self) -> Term:
        t = self.tok
        if t.kind == "num":
            out: Term = Num(self.number())
        elif t.kind == "id":
            out = Var(self.ident())
        elif t.kind in ("code", "param"):
            self.i += 1
            self.expect("(")
            arg = self.term()
            self.expect(")")
            idx = int(t.text[1:])
            out = CodeOut(idx, arg) if t.kind == "code" else Param(idx, arg)
        else:
            raise self.error({"number", "identifier", "'v<i>('", "'w<j>('"})
        while self.accept("+"):
            out = Add(out, self.number())
        return out


def parse_formula(text: str) -> Formula:
    """Parse ``text``; raises :class:`ParseError` with a position on bad input."""
    p = _Parser(text)
    phi = p.formula()
    if p.tok.kind != "end":
        raise p.error({"'&&'", "'||'", "end of input"})
    return phi


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.term()
    if p.tok.kind != "end":
        raise p.error({"'+'", "end of input"})
    return t
