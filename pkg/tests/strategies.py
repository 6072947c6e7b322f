"""Hypothesis strategies and brute-force oracles shared by the test modules."""
from __future__ import annotations

import itertools

from hypothesis import strategies as st

from sacks_lab.products import ProductCondition
from sacks_lab.trees import TreeCondition

nodes = st.text(alphabet="01", max_size=4)


@st.composite
def tree_conditions(draw, max_depth: int = 4, max_leaves: int = 4):
    # grow an antichain by repeatedly splitting a random leaf or pruning one side
    leaves = [""]
    for _ in range(draw(st.integers(0, 6))):
        i = draw(st.integers(0, len(leaves) - 1))
        s = leaves[i]
        if len(s) >= max_depth:
            continue
        if draw(st.booleans()) and len(leaves) < max_leaves:
            leaves[i:i + 1] = [s + "0", s + "1"]
        else:
            leaves[i] = s + draw(st.sampled_from("01"))
    return TreeCondition(tuple(leaves))


@st.composite
def product_conditions(draw, max_coords: int = 3, max_depth: int = 4):
    k = draw(st.integers(0, max_coords))
    coords = {}
    for a in range(k):
        coords[a] = draw(tree_conditions(max_depth=max_depth))
    return ProductCondition.make(coords)


def brute_den(T: TreeCondition, depth: int) -> set[str]:
    """Nodes of length <= depth, tested against the defining clause directly."""
    closure = {l[:k] for l in T.leaves for k in range(len(l) + 1)}
    maximal = [s for s in closure if not any(t != s and t.startswith(s) for t in closure)]
    out = set()
    for d in range(depth + 1):
        for bits in itertools.product("01", repeat=d):
            s = "".join(bits)
            if s in closure or any(s.startswith(l) for l in maximal):
                out.add(s)
    return out


def brute_splitting(T: TreeCondition, depth: int) -> set[str]:
    den = brute_den(T, depth + 1)
    return {s for s in den if len(s) <= depth and s + "0" in den and s + "1" in den}
