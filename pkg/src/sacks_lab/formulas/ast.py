"""Syntax trees for bounded-quantifier arithmetical formulas."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class CodeOut:
    """``v<index>(arg)``: the output of code ``index`` at position ``arg``."""

    index: int
    arg: "Term"


@dataclass(frozen=True)
class Param:
    """``w<index>(arg)``: the value of parameter real ``index`` at ``arg``."""

    index: int
    arg: "Term"


@dataclass(frozen=True)
class Add:
    base: "Term"
    offset: int


Term = Union[Num, Var, CodeOut, Param, Add]

COMPARISONS = ("=", "!=", "<", "<=")


@dataclass(frozen=True)
class Cmp:
    op: str
    left: Term
    right: Term


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Quant:
    kind: str  # "forall" or "exists"
    var: str
    bound: Term
    body: "Formula"


Formula = Union[Cmp, Not, And, Or, Quant]

TRUE = Cmp("=", Num(0), Num(0))
FALSE = Cmp("!=", Num(0), Num(0))


def term_vars(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, (CodeOut, Param)):
        return term_vars(t.arg)
    if isinstance(t, Add):
        return term_vars(t.base)
    return set()


def free_vars(phi: Formula) -> set[str]:
    if isinstance(phi, Cmp):
        return term_vars(phi.left) | term_vars(phi.right)
    if isinstance(phi, Not):
        return free_vars(phi.body)
    if isinstance(phi, (And, Or)):
        return free_vars(phi.left) | free_vars(phi.right)
    return term_vars(phi.bound) | (free_vars(phi.body) - {phi.var})


def quantifier_count(phi: Formula) -> int:
    if isinstance(phi, Cmp):
        return 0
    if isinstance(phi, Not):
        return quantifier_count(phi.body)
    if isinstance(phi, (And, Or)):
        return quantifier_count(phi.left) + quantifier_count(phi.right)
    return 1 + quantifier_count(phi.body)


def conj(*parts: Formula) -> Formula:
    out = parts[0] if parts else TRUE
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(*parts: Formula) -> Formula:
    out = parts[0] if parts else FALSE
    for p in parts[1:]:
        out = Or(out, p)
    return out
