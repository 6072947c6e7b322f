"""Conditions in the countable product of Sacks forcing.

Coordinates are naturals; a coordinate that is not stored is the full tree.
Suitable functions, the ``<=_{F,n}`` orderings, maximal-antichain checks and
the cell-by-cell amalgamation used by every fusion argument live here.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional, Sequence

from . import trees
from .errors import IncompatibleSuitable, NotARefinement
from .report import FusionReport
from .trees import Node, TreeCondition

FULL = TreeCondition.full()


@dataclass(frozen=True)
class ProductCondition:
    """Finite map from coordinates to non-full tree conditions."""

    coords: tuple[tuple[int, TreeCondition], ...] = ()

    def __post_init__(self):
        items = {}
        for a, T in self.coords:
            if a < 0:
                raise ValueError(f"negative coordinate {a}")
            items[int(a)] = T
        canon = tuple(sorted((a, T) for a, T in items.items() if not T.is_full()))
        object.__setattr__(self, "coords", canon)

    @classmethod
    def make(cls, coords: Mapping[int, TreeCondition] | None = None) -> "ProductCondition":
        return cls(tuple((coords or {}).items()))

    @classmethod
    def full(cls) -> "ProductCondition":
        return cls()

    def __getitem__(self, alpha: int) -> TreeCondition:
        for a, T in self.coords:
            if a == alpha:
                return T
        return FULL

    def support(self) -> tuple[int, ...]:
        return tuple(a for a, _ in self.coords)

    def replace(self, alpha: int, T: TreeCondition) -> "ProductCondition":
        d = dict(self.coords)
        d[alpha] = T
        return ProductCondition(tuple(d.items()))

    def to_json(self) -> dict[str, list[str]]:
        return {str(a): T.to_json() for a, T in self.coords}

    @classmethod
    def from_json(cls, data: Mapping[str, Sequence[str]]) -> "ProductCondition":
        coords = {}
        for key, leaves in data.items():
            if not str(key).isdigit():
                raise ValueError(f"coordinate key {key!r} is not a decimal natural")
            coords[int(key)] = TreeCondition.from_leaves(leaves)
        return cls.make(coords)

    def __str__(self) -> str:
        if not self.coords:
            return "{}"
        return "{" + ", ".join(f"{a}: {T}" for a, T in self.coords) + "}"


@dataclass(frozen=True)
class SuitableFunction:
    """A choice of one node of ``spl_n(p(a))`` extended by a bit, per coordinate."""

    entries: tuple[tuple[int, Node], ...] = ()

    def __getitem__(self, alpha: int) -> Node:
        return dict(self.entries)[alpha]

    def domain(self) -> tuple[int, ...]:
        return tuple(a for a, _ in self.entries)

    def __str__(self) -> str:
        return "{" + ", ".join(f'{a}->"{s}"' for a, s in self.entries) + "}"


def standard_F(n: int) -> frozenset[int]:
    """The finite set ``{0, ..., n-1}`` used when only a level is given."""
    return frozenset(range(n))


def suitable_functions(p: ProductCondition, F: Iterable[int], n: int) -> list[SuitableFunction]:
    coords = sorted(set(F))
    choices = [trees.split_successors(p[a], n) for a in coords]
    return [SuitableFunction(tuple(zip(coords, pick))) for pick in itertools.product(*choices)]


def restrict_suitable(p: ProductCondition, sigma: SuitableFunction) -> ProductCondition:
    d = dict(p.coords)
    for a, s in sigma.entries:
        if not trees.denotes(p[a], s):
            raise IncompatibleSuitable(f"sigma({a}) = {s!r} is not in {p[a]}")
        d[a] = trees.restrict_node(p[a], s)
    return ProductCondition(tuple(d.items()))


def restrict_box(p: ProductCondition, rows: Sequence[Node]) -> ProductCondition:
    """Restrict coordinate ``i`` to ``rows[i]`` for each ``i < len(rows)``."""
    d = dict(p.coords)
    for a, s in enumerate(rows):
        d[a] = trees.restrict_node(p[a], s)
    return ProductCondition(tuple(d.items()))


def _coords_of(*ps: ProductCondition) -> set[int]:
    return {a for p in ps for a in p.support()}


def leq_product(
    q: ProductCondition,
    p: ProductCondition,
    F: Optional[Iterable[int]] = None,
    n: Optional[int] = None,
) -> bool:
    """``q <= p``, or ``q <=_{F,n} p`` when both ``F`` and ``n`` are given."""
    if (F is None) != (n is None):
        raise ValueError("F and n must be given together")
    if not all(trees.leq(q[a], p[a]) for a in _coords_of(q, p)):
        return False
    if F is None:
        return True
    return all(trees.split_level(q[a], n) == trees.split_level(p[a], n) for a in F)


def leq_n(q: ProductCondition, p: ProductCondition, n: int) -> bool:
    """``q <=_n p`` read as ``q <=_{{0..n-1}, n} p``."""
    return leq_product(q, p, standard_F(n), n)


def compatible(p: ProductCondition, q: ProductCondition) -> bool:
    return all(trees.compatible(p[a], q[a]) for a in _coords_of(p, q))


def antichain_depth(p: ProductCondition, F: Iterable[int], n: int) -> int:
    F = list(F)
    return max((p[a].max_leaf_depth for a in F), default=0) + n + 2


def check_antichain_family(
    p: ProductCondition,
    family: Sequence[ProductCondition],
    F: Iterable[int],
    depth: int,
) -> FusionReport:
    """Check that ``family`` is a maximal antichain below ``p`` that only cuts ``F``.

    Members must lie below ``p``, be pairwise incompatible, and every tuple of
    depth-``depth`` nodes through ``p`` on the coordinates of ``F`` must be
    inside exactly one member.  Nodes are grouped by which member trees
    contain them, so the tuple sweep runs over the groups only.
    """
    report = FusionReport()
    F = sorted(set(F))
    for i, q in enumerate(family):
        if not leq_product(q, p):
            report.fail(i, "below", f"member {i} is not below p")
        stray = [a for a in _coords_of(q, p) if a not in F and q[a] != p[a]]
        if stray:
            report.fail(i, "cuts_outside_F", f"member {i} changes coordinates {stray}")
    for i, j in itertools.combinations(range(len(family)), 2):
        if compatible(family[i], family[j]):
            report.fail(j, "incompatible", f"members {i} and {j} are compatible")
    classes = []
    for a in F:
        groups: dict[tuple[bool, ...], Node] = {}
        for u in trees.nodes_at(p[a], depth):
            groups.setdefault(tuple(trees.denotes(q[a], u) for q in family), u)
        classes.append(list(groups.items()))
    for combo in itertools.product(*classes):
        hits = [
            i for i in range(len(family)) if all(sig[i] for sig, _ in combo)
        ]
        if len(hits) != 1:
            nodes = {a: u for a, (_, u) in zip(F, combo)}
            report.fail(hits[0] if hits else -1, "cover", f"branch tuple {nodes} lies in {len(hits)} members")
    return report


def antichain_cells(p: ProductCondition, F: Iterable[int], n: int) -> list[ProductCondition]:
    return [restrict_suitable(p, s) for s in suitable_functions(p, F, n)]


def check_antichain(p: ProductCondition, F: Iterable[int], n: int) -> bool:
    F = sorted(set(F))
    cells = antichain_cells(p, F, n)
    return check_antichain_family(p, cells, F, antichain_depth(p, F, n)).ok


def meet(p: ProductCondition, q: ProductCondition) -> Optional[ProductCondition]:
    d = {}
    for a in _coords_of(p, q):
        m = trees.meet(p[a], q[a])
        if m is None:
            return None
        d[a] = m
    return ProductCondition(tuple(d.items()))


def _amalgamation_step(
    q: ProductCondition, F: Sequence[int], n: int, sigma: SuitableFunction, r: ProductCondition
) -> ProductCondition:
    d: dict[int, TreeCondition] = {}
    for a in _coords_of(q, r) | set(F):
        if a in F:
            others = [
                trees.restrict_node(q[a], s)
                for s in trees.split_successors(q[a], n)
                if s != sigma[a]
            ]
            d[a] = trees.union([r[a], *others])
        else:
            d[a] = r[a]
    return ProductCondition(tuple(d.items()))


def amalgamate_dense(
    p: ProductCondition,
    F: Iterable[int],
    n: int,
    choose: Callable[[ProductCondition, SuitableFunction], ProductCondition],
) -> ProductCondition:
    """Refine ``p`` cell by cell, asking ``choose`` for an extension of each cell.

    ``choose(cell, sigma)`` receives the current cell ``q_i | sigma_i`` and must
    return a condition below it.  The result is ``<=_{F,n} p`` and each cell
    lies below the corresponding choice.
    """
    F = sorted(set(F))
    q = p
    for sigma in suitable_functions(p, F, n):
        cell = restrict_suitable(q, sigma)
        r = choose(cell, sigma)
        if not leq_product(r, cell):
            raise NotARefinement(f"choice for {sigma} is not below its cell")
        q = _amalgamation_step(q, F, n, sigma, r)
    return q


def amalgamate(
    p: ProductCondition,
    F: Iterable[int],
    n: int,
    replace: Mapping[SuitableFunction, ProductCondition],
) -> ProductCondition:
    """Glue replacements for some level-``n`` cells back into ``p``.

    Cells are visited in canonical order and each replacement is met with the
    current cell before it is glued in.  The result is ``<=_{F,n} p`` and every
    replaced cell lies below its replacement.  Cells are equal to their
    replacements when ``F`` has one coordinate and nothing outside ``F`` is
    narrowed; with several coordinates, cells sharing a node on some
    coordinate narrow each other.
    """
    F = sorted(set(F))
    sigmas = suitable_functions(p, F, n)
    unknown = set(replace) - set(sigmas)
    if unknown:
        raise IncompatibleSuitable(f"not suitable for this p, F, n: {sorted(map(str, unknown))}")
    for sigma, r in replace.items():
        if not leq_product(r, restrict_suitable(p, sigma)):
            raise NotARefinement(f"replacement for {sigma} is not below its cell")
    q = p
    for sigma in sigmas:
        if sigma in replace:
            r = meet(replace[sigma], restrict_suitable(q, sigma))
            if r is None:
                raise NotARefinement(f"replacement for {sigma} conflicts with earlier replacements")
            q = _amalgamation_step(q, F, n, sigma, r)
    return q


def verify_product_fusion(
    chain: Sequence[ProductCondition], Fseq: Sequence[Iterable[int]]
) -> FusionReport:
    """Check the two fusion hypotheses on a finite chain and level stabilisation."""
    report = FusionReport()
    Fs = [frozenset(F) for F in Fseq]
    if len(Fs) not in (len(chain), len(chain) - 1) and chain:
        report.fail(-1, "lengths", f"{len(chain)} conditions but {len(Fs)} sets")
        return report
    for k in range(len(chain) - 1):
        if not leq_product(chain[k + 1], chain[k]):
            report.fail(k, "leq", "p_{k+1} is not below p_k")
        elif not leq_product(chain[k + 1], chain[k], Fs[k], k):
            report.fail(k, f"leq_F_{k}", f"splitting level {k} changed on F_{k}={sorted(Fs[k])}")
    for k in range(min(len(Fs), len(chain) - 1) - 1):
        if not Fs[k] <= Fs[k + 1]:
            report.fail(k, "F_increasing", f"F_{k} is not a subset of F_{k + 1}")
    for k in range(len(chain) - 1):
        for a in sorted(Fs[k]):
            ref = trees.split_level(chain[k][a], k)
            for m in range(k + 1, len(chain)):
                if trees.split_level(chain[m][a], k) != ref:
                    report.fail(m, f"stable_spl_{k}", f"coordinate {a}")
    return report
