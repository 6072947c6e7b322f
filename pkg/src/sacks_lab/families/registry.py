"""Family types: what makes a family of a type, and what counts as an intruder.

A type is a pair of formula sequences ``psi_n`` (over ``n + 1`` members) and
``chi_n`` (over a candidate ``v`` and ``n`` members).  Each registered type
keeps the formulas as text for documentation and evaluates their meaning
directly on the backend values; unlisted indices mean the always-true formula.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Sequence

from ..errors import BackendMismatch, UnknownType
from ..formulas.semantics import EPReal
from ..perms import EAPermutation
from ..words import Representation, reduced_words, word_perm
from .backends import (
    CodedSet,
    PeriodicTree,
    almost_disjoint,
    eventually_below,
    eventually_different,
    intersection,
    splits,
)

TRUE_TEXT = "⊤"
# longest word checked when deciding that a group of permutations is cofinitary
GROUP_WORD_BOUND = 3

Pred = Callable[..., bool]


@dataclass(frozen=True)
class ArithmeticalType:
    name: str
    member_backend: type
    intruder_backend: type
    psi: Mapping[Any, Pred] = field(default_factory=dict)
    chi: Mapping[Any, Pred] = field(default_factory=dict)
    psi_text: Mapping[Any, str] = field(default_factory=dict)
    chi_text: Mapping[Any, str] = field(default_factory=dict)

    def _lookup(self, table: Mapping[Any, Any], n: int, default):
        if n in table:
            return table[n]
        return table.get("rest", default) if n > max([k for k in table if isinstance(k, int)], default=-1) else default

    def psi_at(self, n: int) -> Pred:
        return self._lookup(self.psi, n, None) or (lambda *ws: True)

    def chi_at(self, n: int) -> Pred:
        return self._lookup(self.chi, n, None) or (lambda v, *ws: True)

    def psi_formula(self, n: int) -> str:
        return self._lookup(self.psi_text, n, TRUE_TEXT)

    def chi_formula(self, n: int) -> str:
        return self._lookup(self.chi_text, n, TRUE_TEXT)


@dataclass(frozen=True)
class FamilyInstance:
    members: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        if len(set(self.members)) != len(self.members):
            raise ValueError("family members must be pairwise distinct")

    def __len__(self) -> int:
        return len(self.members)

    def with_member(self, g) -> "FamilyInstance":
        return FamilyInstance(self.members + (g,))


def _check_backend(kind: type, values: Sequence, role: str) -> None:
    for v in values:
        if not isinstance(v, kind):
            raise BackendMismatch(f"{role} {v!r} is a {type(v).__name__}, expected {kind.__name__}")


def is_of_type(t: ArithmeticalType, F: FamilyInstance) -> bool:
    """``psi_n`` holds on every ``n + 1`` members, taken in family order."""
    _check_backend(t.member_backend, F.members, "member")
    for n in range(len(F)):
        psi = t.psi_at(n)
        if not all(psi(*ws) for ws in itertools.combinations(F.members, n + 1)):
            return False
    return True


def is_intruder(t: ArithmeticalType, g, F: FamilyInstance) -> bool:
    """``chi_n(g, ...)`` holds on every ``n`` members, including ``chi_0(g)``."""
    _check_backend(t.member_backend, F.members, "member")
    _check_backend(t.intruder_backend, [g], "candidate")
    for n in range(len(F) + 1):
        chi = t.chi_at(n)
        if not all(chi(g, *ws) for ws in itertools.combinations(F.members, n)):
            return False
    return True


def _boolean_cells_infinite(sets: Sequence[CodedSet]) -> bool:
    """Every intersection of the sets or their complements is infinite."""
    for signs in itertools.product((True, False), repeat=len(sets)):
        cell = intersection([s if keep else s.complement() for s, keep in zip(sets, signs)])
        if not cell.is_infinite():
            return False
    return True


def _complement_of_union_infinite(*sets: CodedSet) -> bool:
    return intersection([s.complement() for s in sets]).is_infinite()


def cofinitary_group(perms: Sequence[EAPermutation], bound: int = GROUP_WORD_BOUND) -> bool:
    """Every reduced word of length ``<= bound`` in ``perms`` is the identity or has finitely many fixpoints."""
    names = [f"g{i}" for i in range(len(perms))]
    rho = Representation.make(dict(zip(names, perms)))
    for w in reduced_words(names, bound):
        p = word_perm(rho, w)
        if not (p.is_identity() or p.has_finite_fix()):
            return False
    return True


INFINITE = "∀n ∀m (n < m → {v}(n) < {v}(m))"

_TYPES: dict[str, ArithmeticalType] = {}


def _register(t: ArithmeticalType) -> None:
    _TYPES[t.name] = t


_register(ArithmeticalType(
    "mad", CodedSet, CodedSet,
    psi={0: CodedSet.is_infinite, 1: almost_disjoint, "rest": _complement_of_union_infinite},
    chi={0: CodedSet.is_infinite, 1: almost_disjoint},
    psi_text={
        0: INFINITE.format(v="w0"),
        1: "∃N ∀n ∀m (n > N → w0(n) ≠ w1(m))",
        # printed form; evaluated as: the complement of the union of the ranges is infinite
        "rest": "∀N ∃n ∀m (n > N ∧ ⋀_i w_i(m) ≠ n)",
    },
    chi_text={0: INFINITE.format(v="v"), 1: "∃N ∀n ∀m (n > N → v(n) ≠ w1(m))"},
))

_register(ArithmeticalType(
    "med", EPReal, EPReal,
    psi={1: eventually_different}, chi={1: eventually_different},
    psi_text={1: "∃N ∀n (n > N → w0(n) ≠ w1(n))"},
    chi_text={1: "∃N ∀n (n > N → v(n) ≠ w1(n))"},
))

_register(ArithmeticalType(
    "adfs", PeriodicTree, EPReal,
    psi={1: PeriodicTree.almost_disjoint},
    chi={1: lambda v, T: not T.contains_branch(v)},
    psi_text={0: "w0 codes a finitely splitting tree", 1: "∃N ∀n (n > N → w0(n) ≠ 1 ∨ w1(n) ≠ 1)"},
    chi_text={1: "∃n ∀m (code(v|n) = m → w1(m) = 0)"},
))

_register(ArithmeticalType(
    "mcg", EAPermutation, EAPermutation,
    psi={"rest": lambda *ws: cofinitary_group(ws)},
    chi={"rest": lambda v, *ws: cofinitary_group((v,) + ws)},
    psi_text={"rest": "w_i ∈ S∞ ∧ (rho(u) = id ∨ fix(rho(u)) finite) for words u, rho: m ↦ w_m"},
    # the candidate must itself be a permutation generating a cofinitary group with the members
    chi_text={"rest": "v ∈ S∞ ∧ (rho(u) = id ∨ fix(rho(u)) finite) for words u, rho: 0 ↦ v, m ↦ w_m"},
))

_register(ArithmeticalType(
    "independent", CodedSet, CodedSet,
    psi={0: CodedSet.is_infinite, "rest": lambda *ws: _boolean_cells_infinite(ws)},
    chi={0: CodedSet.is_infinite, "rest": lambda v, *ws: _boolean_cells_infinite((v,) + ws)},
    psi_text={0: INFINITE.format(v="w0"), "rest": "every ran(w0)^± ∩ … ∩ ran(wn)^± is infinite"},
    chi_text={0: INFINITE.format(v="v"), "rest": "every ran(v)^± ∩ ran(w1)^± ∩ … ∩ ran(wn)^± is infinite"},
))


def _undecided(v: CodedSet, *ws: CodedSet) -> bool:
    core = intersection(ws)
    return not (core - v).is_empty() and not (core & v).is_empty()


_register(ArithmeticalType(
    "ultrafilter_subbasis", CodedSet, CodedSet,
    psi={0: CodedSet.is_infinite, "rest": lambda *ws: intersection(ws).is_infinite()},
    chi={0: CodedSet.is_infinite, "rest": _undecided},
    psi_text={0: INFINITE.format(v="w0"), "rest": "⋂_i ran(w_i) is infinite"},
    chi_text={0: INFINITE.format(v="v"), "rest": "⋂_i ran(w_i) ⊈ ran(v) ∧ ⋂_i ran(w_i) ⊈ ran(v)^c"},
))

_register(ArithmeticalType(
    "unbounded", EPReal, EPReal,
    chi={1: lambda v, w: eventually_below(w, v)},
    chi_text={1: "∃N ∀n (n > N → w1(n) < v(n))"},
))

_register(ArithmeticalType(
    "dominating", EPReal, EPReal,
    chi={1: lambda v, w: not eventually_below(v, w)},
    chi_text={1: "∀N ∃n (n > N ∧ w1(n) ≤ v(n))"},
))

_register(ArithmeticalType(
    "splitting", CodedSet, CodedSet,
    psi={0: CodedSet.is_infinite},
    chi={0: CodedSet.is_infinite, 1: lambda v, w: not splits(w, v)},
    psi_text={0: INFINITE.format(v="w0")},
    chi_text={0: INFINITE.format(v="v"), 1: "ran(v) ∩ ran(w1) finite ∨ ran(v) ∩ ran(w1)^c finite"},
))

_register(ArithmeticalType(
    "reaping", CodedSet, CodedSet,
    psi={0: CodedSet.is_infinite},
    chi={0: CodedSet.is_infinite, 1: lambda v, w: splits(v, w)},
    psi_text={0: INFINITE.format(v="w0")},
    chi_text={0: INFINITE.format(v="v"), 1: "ran(w1) ∩ ran(v) infinite ∧ ran(w1) ∩ ran(v)^c infinite"},
))

BUILTIN_TYPES = tuple(_TYPES)


def builtin_type(name: str) -> ArithmeticalType:
    try:
        return _TYPES[name]
    except KeyError:
        raise UnknownType(f"unknown family type {name!r}; known types: {', '.join(BUILTIN_TYPES)}") from None


_DECODERS = {
    CodedSet: CodedSet.from_json,
    EPReal: EPReal.from_json,
    EAPermutation: EAPermutation.from_json,
    PeriodicTree: PeriodicTree.from_json,
}


def decode_value(kind: type, data: Any):
    try:
        return _DECODERS[kind](data)
    except (KeyError, TypeError, ValueError) as exc:
        raise BackendMismatch(f"cannot read {data!r} as {kind.__name__}: {exc}") from exc


def load_family(data: Mapping | str) -> tuple[ArithmeticalType, FamilyInstance]:
    """Read ``{"type": name, "members": [...]}``."""
    if isinstance(data, str):
        data = json.loads(data)
    t = builtin_type(data["type"])
    return t, FamilyInstance(tuple(decode_value(t.member_backend, m) for m in data.get("members", ())))


def dump_family(t: ArithmeticalType, F: FamilyInstance) -> dict:
    return {"type": t.name, "members": [m.to_json() for m in F.members]}
