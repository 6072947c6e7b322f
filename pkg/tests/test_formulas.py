from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from sacks_lab import codes as C
from sacks_lab import products as P
from sacks_lab.errors import BudgetExceeded, FreeVariable, IndexBeyondOutput
from sacks_lab.formulas import (
    EPReal, And, CodeOut, Cmp, Not, Num, Param, ParseError, Quant, Var,
    eval_formula, equivalence_check, forces, format_formula, parse_formula, refine_to_decide,
)
from sacks_lab.generators import forcing_instance, random_formula
from sacks_lab.products import ProductCondition
from sacks_lab.trees import TreeCondition

EMPTY = ProductCondition.full()
RIGHT = ProductCondition.make({0: TreeCondition.from_leaves(["1"])})
PROJ = C.projection_code(2)


class TestEPReal:
    def test_values(self):
        r = EPReal((7, 1), (2, 3))
        assert r.values(6) == [7, 1, 2, 3, 2, 3]

    def test_canonical_equality(self):
        assert EPReal((1, 2), (1, 2)) == EPReal((), (2, 1, 2, 1)).__class__((), (1, 2))
        assert EPReal((0, 5), (3, 5)) == EPReal((0,), (5, 3))
        assert EPReal((), (4, 4, 4)) == EPReal.constant(4)

    @given(st.lists(st.integers(0, 3), max_size=4), st.lists(st.integers(0, 3), min_size=1, max_size=4))
    def test_canonical_form_keeps_values(self, prefix, period):
        raw = lambda n: prefix[n] if n < len(prefix) else period[(n - len(prefix)) % len(period)]
        r = EPReal(tuple(prefix), tuple(period))
        assert r.values(30) == [raw(n) for n in range(30)]
        assert EPReal.from_json(r.to_json()) == r


class TestParser:
    def test_bounded_forall(self):
        phi = parse_formula("forall n < 3 . v0(n) = w0(n)")
        assert phi == Quant("forall", "n", Num(3), Cmp("=", CodeOut(0, Var("n")), Param(0, Var("n"))))

    def test_conjunction_with_negation(self):
        phi = parse_formula("v0(0) = 1 && !(w0(2) < 5)")
        assert phi == And(Cmp("=", CodeOut(0, Num(0)), Num(1)), Not(Cmp("<", Param(0, Num(2)), Num(5))))

    def test_missing_bound(self):
        with pytest.raises(ParseError) as info:
            parse_formula("forall n < . v0(n)=0")
        assert info.value.position == 11
        assert "number" in info.value.expected

    def test_precedence(self):
        phi = parse_formula("a = 1 || b = 2 && !c = 3")
        assert format_formula(phi) == "a = 1 || b = 2 && !c = 3"
        assert type(phi).__name__ == "Or"

    def test_quantifier_body_extends_right(self):
        phi = parse_formula("a = 0 && exists n < 2 . n = 0 || n = 1")
        assert isinstance(phi.right, Quant)
        assert type(phi.right.body).__name__ == "Or"

    def test_quantifier_on_the_left_is_parenthesised(self):
        phi = And(Quant("exists", "n", Num(2), Cmp("=", Var("n"), Num(0))), Cmp("=", Num(1), Num(1)))
        text = format_formula(phi)
        assert text == "(exists n < 2 . n = 0) && 1 = 1"
        assert parse_formula(text) == phi

    def test_variable_bound_with_offsets(self):
        phi = parse_formula("forall n < 2 . exists m < n + 1 + 2 . m = n")
        assert format_formula(phi) == "forall n < 2 . exists m < n + 1 + 2 . m = n"

    @pytest.mark.parametrize("text,pos", [("v0(0) =", 7), ("(a = 1", 6), ("a = 1 b", 6), ("v0 = 1", 3), ("a # 1", 2)])
    def test_error_positions(self, text, pos):
        with pytest.raises(ParseError) as info:
            parse_formula(text)
        assert info.value.position == pos

    @settings(max_examples=300)
    @given(st.integers(0, 2 ** 32))
    def test_round_trip(self, seed):
        phi = random_formula(random.Random(seed))
        assert parse_formula(format_formula(phi)) == phi


class TestEvaluation:
    def test_tautology(self):
        assert eval_formula(parse_formula("forall n < 2 . w0(n) = w0(n)"), [], [EPReal.constant(3)])

    def test_code_output(self):
        assert eval_formula(parse_formula("v0(0) = 1"), [[1, 0]])

    def test_existential_witness(self):
        assert eval_formula(parse_formula("exists n < 4 . w0(n) = 7"), [], [EPReal((7,), (0,))])

    def test_index_beyond_output(self):
        with pytest.raises(IndexBeyondOutput):
            eval_formula(parse_formula("v0(2) = 1"), [[1, 0]])

    def test_free_variable(self):
        with pytest.raises(FreeVariable):
            eval_formula(parse_formula("n = 1"), [])

    def test_variable_bound(self):
        phi = parse_formula("forall n < 3 . exists m < n + 1 . m = n")
        assert eval_formula(phi, [])


class TestForces:
    def test_one_sided(self):
        assert forces(RIGHT, [PROJ], [], parse_formula("v0(0) = 1")).kind == "ForcedTrue"

    def test_neither_gives_both_sides(self):
        v = forces(EMPTY, [PROJ], [], parse_formula("v0(0) = 1"))
        assert v.kind == "Neither"
        assert v.q_true == RIGHT
        assert v.q_false == ProductCondition.make({0: TreeCondition.from_leaves(["0"])})

    def test_tautology(self):
        assert forces(EMPTY, [PROJ], [], parse_formula("0 = 0")).kind == "ForcedTrue"

    def test_forced_false(self):
        assert forces(RIGHT, [PROJ], [], parse_formula("v0(0) = 0")).kind == "ForcedFalse"

    def test_budget(self):
        v = forces(EMPTY, [PROJ], [], parse_formula("v0(5) = 0"))
        assert v.kind == "BudgetExceeded" and "v0(5)" in v.reason

    @settings(max_examples=40)
    @given(st.integers(0, 2 ** 32))
    def test_downward_persistent(self, seed):
        rng = random.Random(seed)
        p, codes, params, phi = forcing_instance(rng)
        v = forces(p, codes, params, phi)
        if v.kind == "Neither":
            assert forces(v.q_true, codes, params, phi).kind == "ForcedTrue"
            assert forces(v.q_false, codes, params, phi).kind == "ForcedFalse"
        elif v.kind == "ForcedTrue":
            K = codes[0].depth
            for sigma in P.suitable_functions(p, range(K), 0):
                assert forces(P.restrict_suitable(p, sigma), codes, params, phi).kind == "ForcedTrue"


class TestRefine:
    def test_least_witness_atom(self):
        assert refine_to_decide(EMPTY, [PROJ], [], parse_formula("v0(0) = 1"), 0) == (RIGHT, True)

    def test_tautology_zero_rounds(self):
        assert refine_to_decide(RIGHT, [PROJ], [], parse_formula("0 = 0"), 0) == (RIGHT, True)

    def test_trivial_forall(self):
        phi = parse_formula("forall n < 2 . v0(n) = v0(n)")
        assert refine_to_decide(EMPTY, [PROJ], [], phi, 1) == (EMPTY, True)

    def test_forall_needs_rounds(self):
        phi = parse_formula("forall n < 2 . v0(n) = 1 || v0(n) = 0 && v1(n) = 1")
        code = [C.projection_code(2, 0), C.projection_code(2, 1)]
        with pytest.raises(BudgetExceeded):
            refine_to_decide(EMPTY, code, [], phi, 0)
        r, v = refine_to_decide(EMPTY, code, [], phi, 2)
        assert P.leq_product(r, EMPTY)
        assert forces(r, code, [], phi).kind == ("ForcedTrue" if v else "ForcedFalse")

    def test_existential_search_moves_on(self):
        phi = parse_formula("exists n < 2 . v0(n) = 1 && v0(1) = 0")
        r, v = refine_to_decide(EMPTY, [PROJ], [], phi, 0)
        assert v and forces(r, [PROJ], [], phi).kind == "ForcedTrue"

    @settings(max_examples=60)
    @given(st.integers(0, 2 ** 32))
    def test_result_is_uniform_refinement(self, seed):
        p, codes, params, phi = forcing_instance(random.Random(seed))
        try:
            r, v = refine_to_decide(p, codes, params, phi, 3)
        except BudgetExceeded:
            return
        assert P.leq_product(r, p)
        assert forces(r, codes, params, phi).kind == ("ForcedTrue" if v else "ForcedFalse")


class TestEquivalence:
    @pytest.mark.parametrize("p", [RIGHT, EMPTY])
    @pytest.mark.parametrize("text", ["v0(0) = 1", "0 = 0", "forall n < 2 . v0(n) = v0(n)"])
    def test_examples(self, p, text):
        assert equivalence_check(p, [PROJ], [], parse_formula(text))

    @settings(max_examples=30)
    @given(st.integers(0, 2 ** 32))
    def test_random_instances(self, seed):
        p, codes, params, phi = forcing_instance(random.Random(seed))
        try:
            assert equivalence_check(p, codes, params, phi)
        except BudgetExceeded:
            pass
