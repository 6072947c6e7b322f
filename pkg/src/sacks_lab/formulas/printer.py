"""Pretty-printer producing text that parses back to the same tree."""
from __future__ import annotations

from .ast import Add, And, CodeOut, Cmp, Formula, Not, Num, Or, Param, Quant, Term, Var

_PREC = {Or: 1, And: 2, Not: 3}


def format_term(t: Term) -> str:
    if isinstance(t, Num):
        return str(t.value)
    if isinstance(t, Var):
        return t.name
    if isinstance(t, CodeOut):
        return f"v{t.index}({format_term(t.arg)})"
    if isinstance(t, Param):
        return f"w{t.index}({format_term(t.arg)})"
    return f"{format_term(t.base)} + {t.offset}"


def _fmt(phi: Formula, min_prec: int, tail: bool) -> str:
    if isinstance(phi, Cmp):
        return f"{format_term(phi.left)} {phi.op} {format_term(phi.right)}"
    if isinstance(phi, Quant):
        text = f"{phi.kind} {phi.var} < {format_term(phi.bound)} . {_fmt(phi.body, 0, True)}"
        return text if tail else f"({text})"
    prec = _PREC[type(phi)]
    if prec < min_prec:
        return f"({_fmt(phi, 0, True)})"
    if isinstance(phi, Not):
        return "!" + _fmt(phi.body, 3, tail)
    op = " || " if isinstance(phi, Or) else " && "
    # left operands are never in tail position; right operands bind tighter
    return _fmt(phi.left, prec, False) + op + _fmt(phi.right, prec + 1, tail)


def format_formula(phi: Formula) -> str:
    return _fmt(phi, 0, True)
