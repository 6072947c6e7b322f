"""Single-coordinate Sacks conditions with finitely many leaves.

A :class:`TreeCondition` is a finite binary tree together with the full
binary continuation above each of its maximal nodes.  Its denotation is a
perfect tree, and every operation below is exact on this representation.

Nodes are plain strings over ``"0"``/``"1"``; ``""`` is the root.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import NodeNotInTree, NotARefinement
from .report import FusionReport

Node = str


def check_node(s: str) -> Node:
    for i, ch in enumerate(s):
        if ch not in "01":
            raise ValueError(f"invalid character {ch!r} at position {i} in node {s!r}")
    return s


def is_prefix(s: Node, t: Node) -> bool:
    """``s`` is an initial segment of ``t``."""
    return t.startswith(s)


def comparable(s: Node, t: Node) -> bool:
    return s.startswith(t) or t.startswith(s)


def _canonical(cones: Iterable[Node]) -> tuple[Node, ...]:
    # drop cones contained in other cones, then merge sibling pairs
    nodes = sorted(set(cones), key=lambda s: (len(s), s))
    kept: set[Node] = set()
    for s in nodes:
        if not any(s[:k] in kept for k in range(len(s) + 1)):
            kept.add(s)
    changed = True
    while changed:
        changed = False
        for s in sorted(kept, key=len, reverse=True):
            if s and s[-1] == "0" and s[:-1] + "1" in kept:
                kept -= {s, s[:-1] + "1"}
                kept.add(s[:-1])
                changed = True
                break
    return tuple(sorted(kept))


@dataclass(frozen=True)
class TreeCondition:
    """A Sacks condition: downward closure of ``leaves`` plus full cones above them.

    ``leaves`` is kept canonical (an antichain with no sibling pair), so two
    conditions have the same denotation iff they compare equal.
    """

    leaves: tuple[Node, ...]

    def __post_init__(self):
        if not self.leaves:
            raise ValueError("a tree condition needs at least one leaf")
        object.__setattr__(self, "leaves", _canonical(check_node(s) for s in self.leaves))

    @classmethod
    def full(cls) -> "TreeCondition":
        return cls(("",))

    @classmethod
    def from_leaves(cls, leaves: Iterable[str]) -> "TreeCondition":
        """Build from a leaf list whose downward closure is the finite part.

        Nodes that are proper prefixes of other listed nodes are interior,
        so only maximal ones get a full continuation.
        """
        leaves = [check_node(s) for s in leaves]
        if not leaves:
            raise ValueError("empty leaf list")
        maximal = [s for s in leaves if not any(t != s and t.startswith(s) for t in leaves)]
        return cls(tuple(maximal))

    @classmethod
    def cone_union(cls, cones: Iterable[Node]) -> "TreeCondition":
        """The condition whose denotation is the union of the cones above ``cones``."""
        return cls(tuple(cones))

    def __str__(self) -> str:
        return "[" + ", ".join(f'"{s}"' for s in self.leaves) + "]"

    def to_json(self) -> list[str]:
        return list(self.leaves)

    @property
    def max_leaf_depth(self) -> int:
        return max(len(s) for s in self.leaves)

    def is_full(self) -> bool:
        return self.leaves == ("",)

    def finite_part(self) -> frozenset[Node]:
        return frozenset(s[:k] for s in self.leaves for k in range(len(s) + 1))

    def __contains__(self, s: Node) -> bool:
        return denotes(self, s)


def denotes(T: TreeCondition, s: Node) -> bool:
    return any(comparable(s, l) for l in T.leaves)


def is_splitting(T: TreeCondition, s: Node) -> bool:
    return denotes(T, s + "0") and denotes(T, s + "1")


def restrict_node(T: TreeCondition, s: Node) -> TreeCondition:
    """``T_s``: the nodes of ``T`` comparable with ``s``."""
    if not denotes(T, s):
        raise NodeNotInTree(f"{s!r} is not in {T}")
    if any(s.startswith(l) for l in T.leaves):
        return TreeCondition((s,))
    return TreeCondition(tuple(l for l in T.leaves if l.startswith(s)))


def succ_split(T: TreeCondition, s: Node) -> Node:
    """The least splitting node of ``T`` extending ``s``."""
    if not denotes(T, s):
        raise NodeNotInTree(f"{s!r} is not in {T}")
    while not is_splitting(T, s):
        s = s + ("0" if denotes(T, s + "0") else "1")
    return s


def stem(T: TreeCondition) -> Node:
    return succ_split(T, "")


def split_level(T: TreeCondition, n: int) -> tuple[Node, ...]:
    """The ``n``-th splitting level in lexicographic order (``2**n`` nodes)."""
    if n < 0:
        raise ValueError("level must be non-negative")
    level = [stem(T)]
    for _ in range(n):
        level = [succ_split(T, s + i) for s in level for i in "01"]
    return tuple(level)


def split_successors(T: TreeCondition, n: int) -> tuple[Node, ...]:
    """``spl_n(T)`` with each node extended by 0 and by 1, in lex order."""
    return tuple(s + i for s in split_level(T, n) for i in "01")


def nodes_at(T: TreeCondition, depth: int) -> tuple[Node, ...]:
    """All nodes of the denotation of length exactly ``depth``, lex ordered."""
    out: set[Node] = set()
    for l in T.leaves:
        if len(l) >= depth:
            out.add(l[:depth])
        else:
            for tail in itertools.product("01", repeat=depth - len(l)):
                out.add(l + "".join(tail))
    return tuple(sorted(out))


def den_upto(T: TreeCondition, depth: int) -> frozenset[Node]:
    """Truncation of the denotation to nodes of length at most ``depth``."""
    return frozenset(s for d in range(depth + 1) for s in nodes_at(T, d))


def leq(S: TreeCondition, T: TreeCondition, n: Optional[int] = None) -> bool:
    """``S <= T``; with ``n`` also require equal ``n``-th splitting levels."""
    # canonical leaves: a full cone lies in den(T) iff it sits above a leaf of T
    if not all(any(s.startswith(t) for t in T.leaves) for s in S.leaves):
        return False
    return n is None or split_level(S, n) == split_level(T, n)


def compatible(S: TreeCondition, T: TreeCondition) -> bool:
    """Whether the two conditions have a common extension."""
    return any(comparable(s, t) for s in S.leaves for t in T.leaves)


def union(trees: Iterable[TreeCondition]) -> TreeCondition:
    return TreeCondition.cone_union(l for T in trees for l in T.leaves)


def meet(S: TreeCondition, T: TreeCondition) -> Optional[TreeCondition]:
    """The largest condition below both, or ``None`` when they are incompatible."""
    cones = [max(s, t, key=len) for s in S.leaves for t in T.leaves if comparable(s, t)]
    return TreeCondition.cone_union(cones) if cones else None


def verify_fusion_chain(chain: Sequence[TreeCondition]) -> FusionReport:
    """Check ``chain[n+1] <=_n chain[n]`` and stabilisation of splitting levels."""
    report = FusionReport()
    for n in range(len(chain) - 1):
        if not leq(chain[n + 1], chain[n], n):
            detail = "not a subtree" if not leq(chain[n + 1], chain[n]) else (
                f"spl_{n} differs: {split_level(chain[n + 1], n)} vs {split_level(chain[n], n)}"
            )
            report.fail(n, f"leq_{n}", detail)
    for k in range(len(chain) - 1):
        ref = split_level(chain[k + 1], k)
        for m in range(k + 2, len(chain)):
            if split_level(chain[m], k) != ref:
                report.fail(m, f"stable_spl_{k}", f"changed relative to index {k + 1}")
    return report


@dataclass(frozen=True)
class InducedMap:
    """The level- and lex-preserving bijection between splitting nodes.

    ``resolved`` caches splitting-node images; :meth:`resolve` returns a new
    map with the skeleton grown breadth-first to a given level.
    """

    source: TreeCondition
    target: TreeCondition
    resolved: tuple[tuple[Node, Node], ...] = field(default=(), compare=False)

    def inverse(self) -> "InducedMap":
        return InducedMap(self.target, self.source, tuple((b, a) for a, b in self.resolved))

    def resolve(self, level: int) -> "InducedMap":
        pairs = dict(self.resolved)
        src, tgt = [stem(self.source)], [stem(self.target)]
        for k in range(level + 1):
            for a, b in zip(src, tgt):
                pairs.setdefault(a, b)
            if k < level:
                src = [succ_split(self.source, s + i) for s in src for i in "01"]
                tgt = [succ_split(self.target, s + i) for s in tgt for i in "01"]
        ordered = sorted(pairs.items(), key=lambda kv: (len(kv[0]), kv[0]))
        return InducedMap(self.source, self.target, tuple(ordered))

    def __call__(self, s: Node) -> Node:
        return induced_map_node(self, s)


def induced_map_node(m: InducedMap, s: Node) -> Node:
    """Image of ``s`` under the induced map, extended monotonically.

    Splitting nodes go to their skeleton partners.  A node strictly between
    two consecutive splitting nodes walks the target segment in lockstep,
    stopping at the segment's end if the target segment is shorter.
    """
    src, tgt = m.source, m.target
    if not denotes(src, s):
        raise NodeNotInTree(f"{s!r} is not in {src}")
    t, pt = stem(src), stem(tgt)
    if len(s) < len(t):
        return pt[: len(s)]
    while True:
        if s == t:
            return pt
        i = s[len(t)]
        t_next = succ_split(src, t + i)
        pt_next = succ_split(tgt, pt + i)
        if len(s) < len(t_next):
            return pt_next[: min(len(pt_next), len(pt) + 1 + len(s) - len(t) - 1)]
        t, pt = t_next, pt_next


def image_tree(m: InducedMap, r: TreeCondition) -> TreeCondition:
    """The condition whose branches are the images of the branches of ``r``."""
    if not leq(r, m.source):
        raise NotARefinement(f"{r} is not below the source {m.source}")
    # every leaf of r is a splitting node of the source; its cone maps onto
    # the target cone above the leaf's skeleton image
    return union(restrict_node(m.target, induced_map_node(m, l)) for l in r.leaves)
