"""Decidable stand-ins for the reals, sets and trees a family type talks about.

* :class:`CodedSet` - a subset of the naturals that is finite below a
  threshold and a union of residue classes above it.  Its increasing
  enumeration is the real that codes it.
* :class:`~sacks_lab.formulas.semantics.EPReal` - eventually periodic reals.
* :class:`~sacks_lab.perms.EAPermutation` - eventually affine permutations.
* :class:`PeriodicTree` - a product tree on the naturals whose set of allowed
  values at each level is eventually periodic, hence finitely splitting.

All predicates used by the type registry are decided exactly by looking at
one period past the largest threshold.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from ..formulas.semantics import EPReal


@dataclass(frozen=True)
class CodedSet:
    """``{x < threshold : x in low} ∪ {x >= threshold : x % period in residues}``."""

    threshold: int = 0
    period: int = 1
    residues: frozenset[int] = frozenset()
    low: frozenset[int] = frozenset()

    def __post_init__(self):
        N, d = self.threshold, self.period
        res, low = frozenset(self.residues), frozenset(self.low)
        if d < 1 or N < 0:
            raise ValueError("need period >= 1 and threshold >= 0")
        if any(not 0 <= r < d for r in res) or any(not 0 <= x < N for x in low):
            raise ValueError("residues must lie below the period and low elements below the threshold")
        for k in range(1, d + 1):
            reduced = frozenset(r % k for r in res)
            if d % k == 0 and all((r in res) == ((r % k) in reduced) for r in range(d)):
                res, d = reduced, k
                break
        while N and ((N - 1) in low) == ((N - 1) % d in res):
            N -= 1
            low = low - {N}
        object.__setattr__(self, "threshold", N)
        object.__setattr__(self, "period", d)
        object.__setattr__(self, "residues", res)
        object.__setattr__(self, "low", low)

    @classmethod
    def residue_class(cls, r: int, d: int) -> "CodedSet":
        return cls(0, d, frozenset({r % d}))

    @classmethod
    def finite(cls, elements: Iterable[int]) -> "CodedSet":
        el = frozenset(elements)
        return cls(max(el, default=-1) + 1, 1, frozenset(), el)

    @classmethod
    def from_predicate(cls, threshold: int, period: int, member) -> "CodedSet":
        return cls(
            threshold, period,
            frozenset(r for r in range(period) if member(threshold + ((r - threshold) % period))),
            frozenset(x for x in range(threshold) if member(x)),
        )

    def __contains__(self, x: int) -> bool:
        return x in self.low if x < self.threshold else (x % self.period) in self.residues

    def is_infinite(self) -> bool:
        return bool(self.residues)

    def is_empty(self) -> bool:
        return not self.residues and not self.low

    def elements_below(self, bound: int) -> list[int]:
        return [x for x in range(bound) if x in self]

    def __call__(self, i: int) -> int:
        """The ``i``-th element in increasing order: the real coding this set."""
        low = sorted(self.low)
        if i < len(low):
            return low[i]
        if not self.residues:
            raise IndexError(f"the set has only {len(low)} elements")
        i -= len(low)
        N, d = self.threshold, self.period
        offsets = sorted((r - N) % d for r in self.residues)
        q, k = divmod(i, len(offsets))
        return N + q * d + offsets[k]

    def _combine(self, other: "CodedSet", op) -> "CodedSet":
        N = max(self.threshold, other.threshold)
        d = math.lcm(self.period, other.period)
        return CodedSet.from_predicate(N, d, lambda x: op(x in self, x in other))

    def __and__(self, other: "CodedSet") -> "CodedSet":
        return self._combine(other, lambda a, b: a and b)

    def __or__(self, other: "CodedSet") -> "CodedSet":
        return self._combine(other, lambda a, b: a or b)

    def __sub__(self, other: "CodedSet") -> "CodedSet":
        return self._combine(other, lambda a, b: a and not b)

    def complement(self) -> "CodedSet":
        return CodedSet.from_predicate(self.threshold, self.period, lambda x: x not in self)

    def to_json(self) -> dict:
        return {"threshold": self.threshold, "period": self.period, "residues": sorted(self.residues), "low": sorted(self.low)}

    @classmethod
    def from_json(cls, data: Mapping) -> "CodedSet":
        return cls(int(data.get("threshold", 0)), int(data["period"]), frozenset(data.get("residues", ())), frozenset(data.get("low", ())))

    def __str__(self) -> str:
        tail = "{" + ",".join(map(str, sorted(self.residues))) + f"}} mod {self.period}"
        return f"{sorted(self.low)} below {self.threshold}, {tail} above" if self.threshold else tail


def intersection(sets: Sequence[CodedSet]) -> CodedSet:
    out = CodedSet(0, 1, frozenset({0}))
    for s in sets:
        out = out & s
    return out


def almost_disjoint(a: CodedSet, b: CodedSet) -> bool:
    return not (a & b).is_infinite()


def splits(s: CodedSet, a: CodedSet) -> bool:
    """``s`` splits ``a``: both ``a ∩ s`` and ``a \\ s`` are infinite."""
    return (a & s).is_infinite() and (a - s).is_infinite()


def _tail(f: EPReal, g: EPReal) -> range:
    start = max(len(f.prefix), len(g.prefix))
    return range(start, start + math.lcm(len(f.period), len(g.period)))


def eventually_different(f: EPReal, g: EPReal) -> bool:
    return all(f(i) != g(i) for i in _tail(f, g))


def eventually_below(f: EPReal, g: EPReal) -> bool:
    """``f <* g``: ``f(n) < g(n)`` for all but finitely many ``n``."""
    return all(f(i) < g(i) for i in _tail(f, g))


@dataclass(frozen=True)
class PeriodicTree:
    """The tree of sequences ``s`` with ``s(i) in levels(i)`` for every ``i``.

    ``levels(i)`` is ``prefix[i]`` below the prefix length and cycles through
    ``period`` afterwards; every level is a nonempty finite set.
    """

    prefix: tuple[frozenset[int], ...] = ()
    period: tuple[frozenset[int], ...] = (frozenset({0}),)

    def __post_init__(self):
        prefix = tuple(frozenset(s) for s in self.prefix)
        period = tuple(frozenset(s) for s in self.period)
        if not period or any(not s for s in prefix + period):
            raise ValueError("every level needs at least one allowed value")
        d = len(period)
        for k in range(1, d + 1):
            if d % k == 0 and period == period[:k] * (d // k):
                period = period[:k]
                break
        while prefix and prefix[-1] == period[-1]:
            prefix, period = prefix[:-1], (period[-1],) + period[:-1]
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "period", period)

    def level(self, i: int) -> frozenset[int]:
        if i < len(self.prefix):
            return self.prefix[i]
        return self.period[(i - len(self.prefix)) % len(self.period)]

    def _horizon(self, *others) -> int:
        start = max([len(self.prefix)] + [len(o.prefix) for o in others])
        return start + math.lcm(len(self.period), *[len(o.period) for o in others])

    def contains_branch(self, v: EPReal) -> bool:
        start = max(len(self.prefix), len(v.prefix))
        end = start + math.lcm(len(self.period), len(v.period))
        return all(v(i) in self.level(i) for i in range(end))

    def almost_disjoint(self, other: "PeriodicTree") -> bool:
        """Finite intersection: some level has no common value."""
        return any(not (self.level(i) & other.level(i)) for i in range(self._horizon(other)))

    def to_json(self) -> dict:
        return {"prefix": [sorted(s) for s in self.prefix], "period": [sorted(s) for s in self.period]}

    @classmethod
    def from_json(cls, data: Mapping) -> "PeriodicTree":
        return cls(tuple(frozenset(s) for s in data.get("prefix", ())), tuple(frozenset(s) for s in data["period"]))
