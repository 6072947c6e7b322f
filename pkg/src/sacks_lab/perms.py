"""Decidable permutations of the naturals and finite partial injections.

An :class:`EAPermutation` agrees with a finite table below its threshold and
adds a residue-dependent offset above it.  The class is closed under
composition and inverse, and fixpoint finiteness is read off the offsets.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from .errors import NotBijective


@dataclass(frozen=True)
class EAPermutation:
    """``n -> table[n]`` below ``threshold``, ``n -> n + offsets[n % period]`` above.

    Construction canonicalises (shortest period, lowest threshold) and checks
    bijectivity, so equal permutations compare equal.
    """

    threshold: int
    period: int
    offsets: tuple[int, ...]
    table: tuple[int, ...] = ()

    def __post_init__(self):
        N, d = self.threshold, self.period
        offsets, table = tuple(self.offsets), tuple(self.table)
        if d < 1 or len(offsets) != d:
            raise NotBijective(f"need {d} offsets for period {d}")
        if N < 0 or len(table) != N:
            raise NotBijective(f"table must list the {N} values below the threshold")
        _check_bijective(N, d, offsets, table)
        for k in range(1, d + 1):
            if d % k == 0 and offsets == offsets[:k] * (d // k):
                d, offsets = k, offsets[:k]
                break
        while N and table[N - 1] == N - 1 + offsets[(N - 1) % d]:
            N -= 1
            table = table[:N]
        object.__setattr__(self, "threshold", N)
        object.__setattr__(self, "period", d)
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "table", table)

    @classmethod
    def identity(cls) -> "EAPermutation":
        return cls(0, 1, (0,))

    @classmethod
    def pair_swap(cls) -> "EAPermutation":
        """``2k <-> 2k+1``."""
        return cls(0, 2, (1, -1))

    @classmethod
    def from_cycles(cls, cycles: Iterable[Iterable[int]]) -> "EAPermutation":
        """A finitary permutation given in cycle notation."""
        mapping: dict[int, int] = {}
        for cyc in cycles:
            cyc = list(cyc)
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                if a in mapping:
                    raise NotBijective(f"{a} appears twice in the cycles")
                mapping[a] = b
        N = max(mapping, default=-1) + 1
        return cls(N, 1, (0,), tuple(mapping.get(i, i) for i in range(N)))

    @classmethod
    def from_json(cls, data: Mapping) -> "EAPermutation":
        return cls(int(data["threshold"]), int(data["period"]), tuple(data["offsets"]), tuple(data.get("table", ())))

    def to_json(self) -> dict:
        return {"threshold": self.threshold, "period": self.period, "offsets": list(self.offsets), "table": list(self.table)}

    def __call__(self, n: int) -> int:
        if n < 0:
            raise ValueError("permutations act on naturals")
        if n < self.threshold:
            return self.table[n]
        return n + self.offsets[n % self.period]

    def compose(self, inner: "EAPermutation") -> "EAPermutation":
        """``self ∘ inner``: apply ``inner`` first."""
        L = math.lcm(self.period, inner.period)
        T = max(inner.threshold, self.threshold - min(inner.offsets), 0)
        offsets = tuple(
            inner.offsets[r % inner.period] + self.offsets[(r + inner.offsets[r % inner.period]) % self.period]
            for r in range(L)
        )
        return EAPermutation(T, L, offsets, tuple(self(inner(n)) for n in range(T)))

    def __matmul__(self, inner: "EAPermutation") -> "EAPermutation":
        return self.compose(inner)

    def inverse(self) -> "EAPermutation":
        d = self.period
        starts = {r: _first_at_least(self.threshold, r, d) for r in range(d)}
        T = max(starts[r] + self.offsets[r] for r in range(d))
        inv_offsets = [0] * d
        for r in range(d):
            inv_offsets[(r + self.offsets[r]) % d] = -self.offsets[r]
        preimage = {self(n): n for n in range(self.threshold)}
        table = []
        for m in range(T):
            if m in preimage:
                table.append(preimage[m])
            else:
                table.append(m + inv_offsets[m % d])
        return EAPermutation(T, d, tuple(inv_offsets), tuple(table))

    def is_identity(self) -> bool:
        return self.threshold == 0 and self.offsets == (0,)

    def fixed_classes(self) -> tuple[int, ...]:
        """Residues mod the period with cofinally many fixpoints."""
        return tuple(r for r, o in enumerate(self.offsets) if o == 0)

    def has_finite_fix(self) -> bool:
        return not self.fixed_classes()

    def fixpoints(self) -> frozenset[int]:
        """The full fixpoint set; only defined when it is finite."""
        if not self.has_finite_fix():
            raise ValueError("fixpoint set is infinite")
        return frozenset(n for n in range(self.threshold) if self.table[n] == n)

    def fix_below(self, bound: int) -> frozenset[int]:
        return frozenset(n for n in range(bound) if self(n) == n)

    def __str__(self) -> str:
        return f"EA(N={self.threshold}, d={self.period}, off={list(self.offsets)}, table={list(self.table)})"


def _first_at_least(N: int, r: int, d: int) -> int:
    return N + ((r - N) % d)


def _check_bijective(N: int, d: int, offsets: tuple[int, ...], table: tuple[int, ...]) -> None:
    targets = [(r + offsets[r]) % d for r in range(d)]
    if sorted(targets) != list(range(d)):
        raise NotBijective("tail does not permute the residue classes")
    missed = set()
    for r in range(d):
        start = _first_at_least(N, r, d) + offsets[r]
        if start < 0:
            raise NotBijective(f"tail sends class {r} below zero")
        c = targets[r]
        missed.update(m for m in range(c, start, d))
    if len(set(table)) != len(table) or set(table) != missed:
        raise NotBijective(f"table values {sorted(set(table))} must be exactly the values the tail misses {sorted(missed)}")


@dataclass(frozen=True)
class PartialInjection:
    """A finite injective map on the naturals, stored as sorted pairs."""

    pairs: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        d = dict(self.pairs)
        if len(d) != len(self.pairs) or len(set(d.values())) != len(d):
            raise ValueError(f"not an injective function: {list(self.pairs)}")
        if any(a < 0 or b < 0 for a, b in d.items()):
            raise ValueError("entries must be naturals")
        object.__setattr__(self, "pairs", tuple(sorted(d.items())))

    @classmethod
    def make(cls, mapping: Optional[Mapping[int, int]] = None) -> "PartialInjection":
        return cls(tuple((mapping or {}).items()))

    def __call__(self, n: int) -> Optional[int]:
        return dict(self.pairs).get(n)

    def apply_inverse(self, m: int) -> Optional[int]:
        for a, b in self.pairs:
            if b == m:
                return a
        return None

    def inverse(self) -> "PartialInjection":
        return PartialInjection(tuple((b, a) for a, b in self.pairs))

    def dom(self) -> frozenset[int]:
        return frozenset(a for a, _ in self.pairs)

    def ran(self) -> frozenset[int]:
        return frozenset(b for _, b in self.pairs)

    def extend(self, n: int, m: int) -> "PartialInjection":
        return PartialInjection(self.pairs + ((n, m),))

    def issubset(self, other: "PartialInjection") -> bool:
        return set(self.pairs) <= set(other.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def to_json(self) -> dict[str, int]:
        return {str(a): b for a, b in self.pairs}

    @classmethod
    def from_json(cls, data: Mapping) -> "PartialInjection":
        return cls.make({int(k): int(v) for k, v in data.items()})

    def __str__(self) -> str:
        return "{" + ",".join(f"{a}->{b}" for a, b in self.pairs) + "}"
