from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from sacks_lab import products as P
from sacks_lab import trees
from sacks_lab.errors import IncompatibleSuitable, NotARefinement
from sacks_lab.products import ProductCondition, SuitableFunction
from sacks_lab.trees import TreeCondition

from strategies import brute_den, product_conditions

FULL = TreeCondition.full()
EMPTY = ProductCondition.full()


def T(*leaves):
    return TreeCondition.from_leaves(leaves)


def PC(**kw):
    return ProductCondition.make({int(k[1:]): v for k, v in kw.items()})


def test_full_coordinates_are_normalized_away():
    assert PC(c0=FULL, c2=T("1")).support() == (2,)
    assert PC(c0=FULL) == EMPTY


def test_json_round_trip():
    p = PC(c0=T("01"), c3=T("1", "00"))
    assert ProductCondition.from_json(p.to_json()) == p
    with pytest.raises(ValueError):
        ProductCondition.from_json({"x": ["0"]})


class TestSuitable:
    def test_single_coordinate_level_zero(self):
        got = P.suitable_functions(EMPTY, {0}, 0)
        assert [s.entries for s in got] == [((0, "0"),), ((0, "1"),)]

    def test_count_two_coordinates_level_one(self):
        assert len(P.suitable_functions(EMPTY, {0, 1}, 1)) == 16

    def test_follows_stem(self):
        got = P.suitable_functions(PC(c0=T("1")), {0}, 0)
        assert [s[0] for s in got] == ["10", "11"]

    def test_canonical_order(self):
        got = P.suitable_functions(EMPTY, {1, 0}, 0)
        assert [tuple(s[a] for a in (0, 1)) for s in got] == [
            ("0", "0"), ("0", "1"), ("1", "0"), ("1", "1")
        ]

    def test_restrict(self):
        q = P.restrict_suitable(EMPTY, SuitableFunction(((0, "0"),)))
        assert q[0] == T("0")
        assert P.restrict_suitable(EMPTY, SuitableFunction()) == EMPTY
        q = P.restrict_suitable(PC(c0=T("01")), SuitableFunction(((0, "010"),)))
        assert q[0].leaves == ("010",)

    def test_restrict_outside_tree(self):
        with pytest.raises(IncompatibleSuitable):
            P.restrict_suitable(PC(c0=T("1")), SuitableFunction(((0, "0"),)))

    @given(product_conditions(), st.integers(0, 2))
    def test_counts(self, p, n):
        F = set(p.support()) | {0}
        assert len(P.suitable_functions(p, F, n)) == (2 ** (n + 1)) ** len(F)


class TestOrdering:
    def test_reflexive(self):
        p = PC(c0=T("01"), c1=T("1"))
        assert P.leq_product(p, p, {0, 1}, 2)

    def test_restriction_refines_but_collapses_level(self):
        p = PC(c0=T("01"))
        sigma = P.suitable_functions(p, {0}, 1)[0]
        q = P.restrict_suitable(p, sigma)
        assert P.leq_product(q, p)
        assert not P.leq_product(q, p, {0}, 1)

    def test_requires_both_F_and_n(self):
        with pytest.raises(ValueError):
            P.leq_product(EMPTY, EMPTY, {0}, None)

    def test_leq_n_uses_initial_segment(self):
        q = PC(c3=T("0"))
        assert P.leq_n(q, EMPTY, 2)
        assert not P.leq_n(PC(c1=T("0")), EMPTY, 2)

    @given(product_conditions(), st.integers(0, 2), st.data())
    def test_same_suitable_functions_below(self, p, n, data):
        F = set(p.support())
        q = p
        for a in F:
            level = trees.split_level(p[a], n + 1)
            s = data.draw(st.sampled_from(level))
            keep = [trees.restrict_node(p[a], t + i) for t in level for i in "01" if t != s]
            q = q.replace(a, trees.union([*keep, trees.restrict_node(p[a], s + "0")]))
        assert P.leq_product(q, p, F, n)
        assert P.suitable_functions(q, F, n) == P.suitable_functions(p, F, n)


def brute_cover(p, cells, F, depth):
    """Count, for every depth-bounded tuple through p, the cells containing it."""
    axes = [sorted(s for s in brute_den(p[a], depth) if len(s) == depth) for a in F]
    for combo in itertools.product(*axes):
        yield sum(
            all(u in brute_den(c[a], depth) for a, u in zip(F, combo)) for c in cells
        )


class TestAntichain:
    def test_single_coordinate(self):
        assert P.check_antichain(EMPTY, {0}, 0)

    def test_two_coordinates_level_one(self):
        assert P.check_antichain(EMPTY, {0, 1}, 1)

    def test_dropping_a_cell_breaks_coverage(self):
        cells = P.antichain_cells(EMPTY, [0, 1], 1)
        report = P.check_antichain_family(EMPTY, cells[1:], [0, 1], 4)
        assert not report.ok
        assert {c for _, c, _ in report.failures} == {"cover"}

    def test_duplicate_cell_breaks_incompatibility(self):
        cells = P.antichain_cells(EMPTY, [0], 0)
        report = P.check_antichain_family(EMPTY, cells + cells[:1], [0], 3)
        assert "incompatible" in {c for _, c, _ in report.failures}

    @settings(max_examples=40)
    @given(product_conditions(max_coords=2, max_depth=3), st.integers(0, 1))
    def test_cover_matches_brute_force(self, p, n):
        F = sorted(set(p.support()) | {0})
        cells = P.antichain_cells(p, F, n)
        depth = P.antichain_depth(p, F, n)
        assert set(brute_cover(p, cells, F, depth)) == {1}
        assert P.check_antichain(p, F, n)


class TestAmalgamate:
    def test_identity_replacement(self):
        p = PC(c0=T("01", "1"), c1=T("0"))
        F = [0, 1]
        replace = {s: P.restrict_suitable(p, s) for s in P.suitable_functions(p, F, 1)}
        assert P.amalgamate(p, F, 1, replace) == p

    def test_left_cell_narrowed(self):
        left = P.suitable_functions(EMPTY, {0}, 0)[0]
        q = P.amalgamate(EMPTY, {0}, 0, {left: PC(c0=T("00"))})
        assert q[0].leaves == ("00", "1")

    def test_two_cells_at_level_one(self):
        sig = P.suitable_functions(EMPTY, {0}, 1)
        replace = {sig[0]: PC(c0=T("001")), sig[3]: PC(c0=T("1101"))}
        q = P.amalgamate(EMPTY, {0}, 1, replace)
        assert P.leq_product(q, EMPTY, {0}, 1)
        assert P.check_antichain(q, {0}, 1)
        for s in sig:
            expect = replace.get(s, P.restrict_suitable(EMPTY, s))
            assert P.restrict_suitable(q, s) == expect

    def test_rejects_non_refinement(self):
        sig = P.suitable_functions(EMPTY, {0}, 0)
        with pytest.raises(NotARefinement):
            P.amalgamate(EMPTY, {0}, 0, {sig[0]: PC(c0=T("1"))})

    def test_rejects_foreign_key(self):
        with pytest.raises(IncompatibleSuitable):
            P.amalgamate(EMPTY, {0}, 0, {SuitableFunction(((0, "00"),)): PC(c0=T("00"))})

    def test_outside_F_narrowing_is_inherited(self):
        sig = P.suitable_functions(EMPTY, {0}, 0)
        q = P.amalgamate(EMPTY, {0}, 0, {sig[0]: PC(c0=T("0"), c1=T("1"))})
        assert q[1] == T("1")
        assert P.leq_product(P.restrict_suitable(q, sig[1]), P.restrict_suitable(EMPTY, sig[1]))

    @settings(max_examples=60)
    @given(product_conditions(max_coords=2, max_depth=3), st.integers(0, 1), st.data())
    def test_cells_equal_replacements(self, p, n, data):
        F = sorted(set(p.support()) | {0})
        replace = {}
        for s in P.suitable_functions(p, F, n):
            if data.draw(st.booleans()):
                cell = P.restrict_suitable(p, s)
                a = data.draw(st.sampled_from(F))
                ext = data.draw(st.sampled_from("01"))
                node = trees.succ_split(cell[a], s[a] if a in s.domain() else "") + ext
                replace[s] = cell.replace(a, trees.restrict_node(cell[a], node))
        try:
            q = P.amalgamate(p, F, n, replace)
        except NotARefinement:
            assert len(F) > 1
            return
        assert P.leq_product(q, p, F, n)
        assert P.check_antichain(q, F, n)
        for s in P.suitable_functions(p, F, n):
            cell = P.restrict_suitable(q, s)
            expect = replace.get(s, P.restrict_suitable(p, s))
            assert P.leq_product(cell, expect)
            if len(F) == 1:
                assert cell == expect

    def test_cells_sharing_a_node_narrow_each_other(self):
        sig = P.suitable_functions(EMPTY, [0, 1], 0)
        q = P.amalgamate(EMPTY, [0, 1], 0, {sig[3]: PC(c0=T("10"), c1=T("1"))})
        assert P.restrict_suitable(q, sig[2])[0] == T("10")
        assert P.restrict_suitable(q, sig[3]) == PC(c0=T("10"), c1=T("1"))

    def test_conflicting_replacements(self):
        sig = P.suitable_functions(EMPTY, [0, 1], 0)
        replace = {sig[2]: PC(c0=T("10"), c1=T("0")), sig[3]: PC(c0=T("11"), c1=T("1"))}
        with pytest.raises(NotARefinement):
            P.amalgamate(EMPTY, [0, 1], 0, replace)

    def test_dense_chooser_sees_current_cell(self):
        seen = []

        def choose(cell, sigma):
            seen.append(cell)
            return cell.replace(5, T("1")) if sigma[0] == "0" else cell

        q = P.amalgamate_dense(EMPTY, {0}, 0, choose)
        assert seen[1][5] == T("1")
        assert q[5] == T("1")


class TestProductFusion:
    def test_constant_chain(self):
        p = PC(c0=T("01"))
        assert P.verify_product_fusion([p, p, p], [{0}, {0}, {0}]).ok

    def test_shrinking_F_is_flagged(self):
        report = P.verify_product_fusion([EMPTY] * 3, [{0, 1}, {0}])
        assert ("F_increasing" in {c for _, c, _ in report.failures})

    def test_amalgamation_rounds(self):
        chain = [EMPTY]
        Fs = [set(), {0}, {0, 1}]
        for k, F in enumerate(Fs):
            def choose(cell, sigma, k=k):
                return cell.replace(2, trees.restrict_node(cell[2], "1" * (k + 1)))
            F_here = F | {0}
            chain.append(P.amalgamate_dense(chain[-1], F_here, k, choose))
            Fs[k] = F_here
        assert P.verify_product_fusion(chain, Fs).ok
