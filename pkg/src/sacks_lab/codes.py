"""Finite-depth monotone codes for continuous functions on branch matrices.

A matrix is a tuple of binary strings (its rows).  A code of depth ``K``
tabulates outputs on square matrices of size at most ``K``; lookups on any
other matrix use its largest square slice, and missing entries mean the
empty output.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence, Union

from . import trees
from .errors import InsufficientDepth, InvalidCode
from .products import ProductCondition
from .report import FusionReport

Matrix = tuple[str, ...]
Output = tuple[int, ...]


def matrix(rows: Iterable[str]) -> Matrix:
    return tuple(trees.check_node(r) for r in rows)


def square_size(m: Matrix) -> int:
    """Largest ``n`` such that ``m`` has ``n`` rows of length at least ``n``."""
    n = 0
    while n < len(m) and all(len(r) > n for r in m[: n + 1]):
        n += 1
    return n


def square(m: Matrix, n: int) -> Matrix:
    """``m | n x n``: the first ``n`` rows cut to length ``n``."""
    if square_size(m) < n:
        raise InsufficientDepth(f"matrix {list(m)} has no {n}x{n} slice")
    return tuple(r[:n] for r in m[:n])


def dominated(s: Matrix, t: Matrix) -> bool:
    """``s ⊴ t``: no more rows, and each row of ``s`` is a prefix of the same row of ``t``."""
    return len(s) <= len(t) and all(t[i].startswith(r) for i, r in enumerate(s))


def all_squares(n: int) -> Iterable[Matrix]:
    """Every ``n x n`` binary matrix in row-major lex order."""
    rows = ["".join(b) for b in itertools.product("01", repeat=n)]
    return itertools.product(rows, repeat=n)


def is_prefix_seq(a: Sequence[int], b: Sequence[int]) -> bool:
    return len(a) <= len(b) and tuple(b[: len(a)]) == tuple(a)


@dataclass(frozen=True)
class Code:
    """A finite table coding a continuous map from branch matrices to reals.

    ``bound`` is the declared minimum output length on full ``K x K`` matrices.
    """

    depth: int
    table: Mapping[Matrix, Output] = field(default_factory=dict, hash=False)
    bound: int = 1

    def __post_init__(self):
        if self.depth < 0:
            raise InvalidCode("depth must be non-negative")
        clean = {}
        for key, out in self.table.items():
            key = matrix(key)
            n = len(key)
            if n > self.depth or any(len(r) != n for r in key):
                raise InvalidCode(f"table key {list(key)} is not a square of size <= {self.depth}")
            if any(not isinstance(v, int) or v < 0 for v in out):
                raise InvalidCode(f"output {list(out)} is not a sequence of naturals")
            clean[key] = tuple(out)
        object.__setattr__(self, "table", clean)

    def output(self, m: Matrix) -> Output:
        n = min(self.depth, square_size(m))
        return self.table.get(square(m, n), ())

    @classmethod
    def from_function(cls, depth: int, fn: Callable[[Matrix], Sequence[int]], bound: int = 1) -> "Code":
        """Tabulate ``fn`` on every square matrix of size at most ``depth``."""
        table = {}
        for n in range(depth + 1):
            for m in all_squares(n):
                out = tuple(fn(m))
                if out:
                    table[m] = out
        return cls(depth, table, bound)

    def to_json(self) -> dict:
        entries = [{"rows": list(k), "out": list(v)} for k, v in sorted(self.table.items(), key=lambda kv: (len(kv[0]), kv[0]))]
        return {"depth": self.depth, "entries": entries, "bound": self.bound}

    @classmethod
    def from_json(cls, data: Union[str, Mapping]) -> "Code":
        """Load and validate; an invalid table raises :class:`InvalidCode`."""
        if isinstance(data, str):
            data = json.loads(data)
        try:
            table = {tuple(e["rows"]): tuple(e["out"]) for e in data["entries"]}
            code = cls(int(data["depth"]), table, int(data.get("bound", 1)))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, InvalidCode):
                raise
            raise InvalidCode(f"malformed code file: {exc}") from exc
        report = validate_code(code)
        if not report.ok:
            raise InvalidCode("; ".join(f"{c}: {d}" for _, c, d in report.failures[:5]))
        return code


def validate_code(c: Code) -> FusionReport:
    """Check monotonicity on all dominated pairs and the declared output bound."""
    report = FusionReport()
    keys = sorted(c.table, key=lambda k: (len(k), k))
    for idx, t in enumerate(keys):
        for n in range(len(t)):
            s = square(t, n)
            if not is_prefix_seq(c.table.get(s, ()), c.table[t]):
                report.fail(idx, "monotone", f"{list(s)} -> {list(c.table.get(s, ()))} is not a prefix of {list(t)} -> {list(c.table[t])}")
    short = [m for m in all_squares(c.depth) if len(c.table.get(m, ())) < c.bound]
    for m in short:
        report.fail(-1, "proper", f"{list(m)} has output length {len(c.table.get(m, ()))} < {c.bound}")
    return report


def eval_star(c: Code, m: Matrix) -> Output:
    """``c*(m)``: the output on the ``K x K`` slice, the union of the square outputs."""
    if square_size(m) < c.depth:
        raise InsufficientDepth(f"matrix needs {c.depth} rows of length >= {c.depth}")
    return c.table.get(square(m, c.depth), ())


def branch_matrices(p: ProductCondition, K: int) -> list[Matrix]:
    """All ``K x K`` matrices whose row ``a`` lies in ``p(a)``, row-major lex order."""
    return list(itertools.product(*(trees.nodes_at(p[a], K) for a in range(K))))


@dataclass(frozen=True)
class Forced:
    value: int

    def __str__(self) -> str:
        return f"Forced({self.value})"


@dataclass(frozen=True)
class NotForced:
    witness: Matrix
    other: Matrix

    def __str__(self) -> str:
        return f"NotForced({list(self.witness)} vs {list(self.other)})"


@dataclass(frozen=True)
class Undetermined:
    witness: Matrix

    def __str__(self) -> str:
        return f"Undetermined({list(self.witness)})"


Verdict = Union[Forced, NotForced, Undetermined]


def decide_value(p: ProductCondition, c: Code, k: int) -> Verdict:
    """Whether every branch matrix through ``p`` gives the same ``k``-th output."""
    mats = branch_matrices(p, c.depth)
    outs = [eval_star(c, m) for m in mats]
    for m, out in zip(mats, outs):
        if len(out) <= k:
            return Undetermined(m)
    first = outs[0][k]
    for m, out in zip(mats, outs):
        if out[k] != first:
            return NotForced(mats[0], m)
    return Forced(first)


def projection_code(K: int, row: int = 0) -> Code:
    """Outputs the bits of one row."""
    return Code.from_function(K, lambda m: [int(b) for b in m[row]] if len(m) > row else [], bound=K)


def constant_code(K: int, values: Sequence[int]) -> Code:
    return Code.from_function(K, lambda m: list(values), bound=len(values))


def increment_code(K: int) -> Code:
    """Outputs the first row's bits plus one."""
    return Code.from_function(K, lambda m: [int(b) + 1 for b in m[0]] if m else [], bound=K)
