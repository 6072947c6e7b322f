"""Bounded-quantifier formulas over code outputs and parameter reals."""
from .ast import (
    FALSE,
    TRUE,
    Add,
    And,
    Cmp,
    CodeOut,
    Formula,
    Not,
    Num,
    Or,
    Param,
    Quant,
    Term,
    Var,
    conj,
    disj,
    free_vars,
    quantifier_count,
)
from .forcing import ForceVerdict, equivalence_check, forces, refine_to_decide
from .parser import ParseError, parse_formula, parse_term
from .printer import format_formula, format_term
from .semantics import EPReal, eval_formula

__all__ = [
    "FALSE", "TRUE", "Add", "And", "Cmp", "CodeOut", "Formula", "Not", "Num", "Or", "Param",
    "Quant", "Term", "Var", "conj", "disj", "free_vars", "quantifier_count", "ForceVerdict",
    "equivalence_check", "forces", "refine_to_decide", "ParseError", "parse_formula",
    "parse_term", "format_formula", "format_term", "EPReal", "eval_formula",
]
