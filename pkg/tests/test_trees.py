from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from sacks_lab import trees
from sacks_lab.errors import NodeNotInTree, NotARefinement
from sacks_lab.trees import InducedMap, TreeCondition

from strategies import brute_den, brute_splitting, nodes, tree_conditions

FULL = TreeCondition.full()


def T(*leaves):
    return TreeCondition.from_leaves(leaves)


class TestMembership:
    def test_full_tree_contains_everything(self):
        assert trees.denotes(FULL, "0110")

    def test_pruned_side_is_absent(self):
        assert not trees.denotes(T("0"), "1")

    def test_prefix_of_leaf_is_present(self):
        assert trees.denotes(T("01"), "0")

    def test_rejects_bad_characters(self):
        with pytest.raises(ValueError, match="position 2"):
            T("01x")

    def test_sibling_leaves_collapse(self):
        assert T("00", "01", "1") == FULL

    def test_from_leaves_ignores_interior_nodes(self):
        assert T("0", "01") == T("01")

    @given(tree_conditions(), nodes)
    def test_matches_brute_force(self, tree, s):
        assert trees.denotes(tree, s) == (s in brute_den(tree, len(s)))


class TestRestriction:
    def test_full_tree(self):
        assert trees.restrict_node(FULL, "01").leaves == ("01",)

    def test_at_stem_is_identity(self):
        tree = T("0110", "0111", "010")
        assert trees.restrict_node(tree, trees.stem(tree)) == tree

    def test_right_branch(self):
        assert trees.restrict_node(T("00", "1"), "1").leaves == ("1",)

    def test_missing_node_raises(self):
        with pytest.raises(NodeNotInTree):
            trees.restrict_node(T("00"), "1")

    @given(tree_conditions(), nodes)
    def test_brute_force_filter(self, tree, s):
        if not trees.denotes(tree, s):
            return
        r = trees.restrict_node(tree, s)
        depth = len(s) + 3 + tree.max_leaf_depth
        expect = {t for t in brute_den(tree, depth) if t.startswith(s) or s.startswith(t)}
        assert brute_den(r, depth) == expect
        assert trees.leq(r, tree)


class TestSplitting:
    def test_root_splits_in_full_tree(self):
        assert trees.succ_split(FULL, "") == ""

    def test_stem_of_single_leaf(self):
        assert trees.succ_split(T("01"), "") == "01"

    def test_leaf_of_finite_part_splits(self):
        assert trees.succ_split(T("0", "1"), "1") == "1"

    def test_level_zero_is_stem(self):
        assert trees.split_level(T("0110"), 0) == ("0110",)

    def test_level_one_of_full_tree(self):
        assert trees.split_level(FULL, 1) == ("0", "1")

    def test_level_one_with_uneven_leaves(self):
        assert trees.split_level(T("00", "01", "1"), 1) == ("0", "1")

    def test_level_one_after_pruning(self):
        assert trees.split_level(T("011", "10"), 1) == ("011", "10")

    @given(tree_conditions(), st.integers(0, 3))
    def test_level_shape(self, tree, n):
        level = trees.split_level(tree, n)
        assert len(level) == 2 ** n == len(set(level))
        assert list(level) == sorted(level)
        assert all(not trees.comparable(a, b) for a in level for b in level if a != b)
        depth = tree.max_leaf_depth + n + 1
        assert set(level) <= brute_splitting(tree, depth)
        if n:
            prev = trees.split_level(tree, n - 1)
            for t in level:
                assert any(t.startswith(s + i) for s in prev for i in "01")


class TestOrdering:
    def test_reflexive(self):
        tree = T("010", "11")
        assert all(trees.leq(tree, tree, n) for n in range(4))

    def test_restriction_shrinks(self):
        assert trees.leq(trees.restrict_node(FULL, "0"), FULL)

    def test_pruning_above_level_one(self):
        # full tree except that above "11" only "110" continues
        S = T("0", "10", "110")
        assert trees.leq(S, FULL, 1)
        assert not trees.leq(S, FULL, 2)

    def test_level_two_pruning(self):
        assert not trees.leq(T("0"), FULL, 0)

    @given(tree_conditions(), tree_conditions())
    def test_inclusion_matches_brute_force(self, S, U):
        depth = max(S.max_leaf_depth, U.max_leaf_depth) + 3
        assert trees.leq(S, U) == (brute_den(S, depth) <= brute_den(U, depth))

    @given(tree_conditions(), tree_conditions())
    def test_compatibility_matches_brute_force(self, S, U):
        depth = max(S.max_leaf_depth, U.max_leaf_depth) + 1
        common = brute_den(S, depth) & brute_den(U, depth)
        assert trees.compatible(S, U) == any(len(s) == depth for s in common)


def narrow(tree: TreeCondition, n: int, pick: int) -> TreeCondition:
    """Keep one side above a level-(n+1) splitting node, leaving spl_n intact."""
    level = trees.split_level(tree, n + 1)
    s = level[pick % len(level)]
    rest = [trees.restrict_node(tree, t + i) for t in level for i in "01" if t != s]
    side = trees.restrict_node(tree, trees.succ_split(tree, s + "0") + str(pick % 2))
    return trees.union([side, trees.restrict_node(tree, s + "1"), *rest])


class TestFusion:
    def test_constant_chain(self):
        assert trees.verify_fusion_chain([FULL] * 3).ok

    def test_violation_flags_index(self):
        chain = [FULL, FULL, T("0", "10"), T("0", "10")]
        report = trees.verify_fusion_chain(chain)
        assert 1 in report.failed_indices()
        assert not report.ok

    def test_hand_built_narrowing(self):
        chain = [FULL]
        for n, pick in enumerate([1, 2, 5]):
            chain.append(narrow(chain[-1], n, pick))
        assert len(chain) == 4
        assert trees.verify_fusion_chain(chain).ok
        for k in range(3):
            assert len({trees.split_level(c, k) for c in chain[k:]}) == 1

    @given(tree_conditions(), st.lists(st.integers(0, 20), min_size=1, max_size=4))
    def test_generated_chains_pass(self, start, picks):
        chain = [start]
        for n, pick in enumerate(picks):
            chain.append(narrow(chain[-1], n, pick))
        assert trees.verify_fusion_chain(chain).ok


class TestInducedMap:
    @given(tree_conditions(), nodes)
    def test_identity(self, tree, s):
        if trees.denotes(tree, s):
            assert InducedMap(tree, tree)(s) == s

    def test_full_to_single_leaf(self):
        m = InducedMap(FULL, T("01"))
        assert m("") == "01"
        assert m("0") == "010"

    def test_coinciding_skeletons(self):
        assert InducedMap(T("0", "1"), FULL)("10") == "10"

    def test_outside_source_raises(self):
        with pytest.raises(NodeNotInTree):
            InducedMap(T("0"), FULL)("1")

    def test_resolve_is_breadth_first(self):
        m = InducedMap(FULL, T("01")).resolve(1)
        assert [a for a, _ in m.resolved] == ["", "0", "1"]
        assert dict(m.resolved) == {"": "01", "0": "010", "1": "011"}
        assert m.resolve(1).resolved == m.resolved

    @given(tree_conditions(), tree_conditions(), st.integers(0, 3))
    def test_preserves_levels_and_order(self, S, U, n):
        m = InducedMap(S, U)
        assert tuple(map(m, trees.split_level(S, n))) == trees.split_level(U, n)

    @given(tree_conditions(), tree_conditions(), nodes, nodes)
    def test_monotone(self, S, U, a, b):
        if trees.denotes(S, a) and trees.denotes(S, a + b):
            assert m_prefix(InducedMap(S, U), a, a + b)


def m_prefix(m, s, t):
    return m(t).startswith(m(s))


class TestImageTree:
    @given(tree_conditions(), nodes)
    def test_identity(self, tree, s):
        if trees.denotes(tree, s):
            r = trees.restrict_node(tree, s)
            assert trees.image_tree(InducedMap(tree, tree), r) == r

    def test_pushes_cone_through_skeleton(self):
        m = InducedMap(FULL, T("01"))
        assert trees.image_tree(m, trees.restrict_node(FULL, "0")) == T("010")

    @given(tree_conditions(), tree_conditions())
    def test_whole_source_maps_to_target(self, S, U):
        assert trees.image_tree(InducedMap(S, U), S) == U

    def test_requires_refinement(self):
        with pytest.raises(NotARefinement):
            trees.image_tree(InducedMap(T("0"), FULL), T("1"))

    @settings(max_examples=60)
    @given(tree_conditions(), tree_conditions(), tree_conditions())
    def test_round_trip(self, S, U, R):
        # build r <= S by transporting R through the map from the full tree
        r = trees.image_tree(InducedMap(FULL, S), R)
        m = InducedMap(S, U)
        img = trees.image_tree(m, r)
        assert trees.leq(img, U)
        assert trees.image_tree(m.inverse(), img) == r
