from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from sacks_lab import codes as C
from sacks_lab import fixtures
from sacks_lab import products as P
from sacks_lab.cofinitary import (
    VERIFY_BOUND, bound_M, exact_fixpoints, extend_domain, extend_range, mcg_eliminate, nice_words, verify_preserved,
)
from sacks_lab.errors import BudgetExceeded, InfiniteFix, NotNice, PremiseFailure
from sacks_lab.generators import random_extension_instance
from sacks_lab.perms import EAPermutation, PartialInjection
from sacks_lab.products import ProductCondition
from sacks_lab.words import Representation, evaluate, is_nice, perp, word

TAU = EAPermutation.pair_swap()
SWAP = Representation.make({"a": TAU})
TOP = ProductCondition.make({})
seeds = st.integers(0, 2 ** 32)


def pi(mapping):
    return PartialInjection.make(mapping)


def brute_fix(rho, x, w, bound):
    return {k for k in range(bound) if evaluate(rho.with_x(x), w, k) == k}


class TestBoundM:
    def test_block_word(self):
        assert bound_M(SWAP, pi({0: 1}), [word("a x")], 2) == 4

    def test_pure_power(self):
        assert bound_M(SWAP, pi({}), [word("x x")], 0) == 1

    def test_no_words(self):
        assert bound_M(SWAP, pi({}), [], 0) == 1

    def test_not_nice(self):
        with pytest.raises(NotNice):
            bound_M(SWAP, pi({}), [word("a")], 0)

    def test_infinite_fix_block(self):
        rho = Representation.make({"a": EAPermutation.identity(), "b": TAU})
        # "b b" is the identity, hence excluded from nice words; a fixes everything
        with pytest.raises((InfiniteFix, NotNice)):
            bound_M(rho, pi({}), [word("a x")], 0)


class TestExtendDomain:
    def test_block_example(self):
        cert = extend_domain(SWAP, pi({0: 1}), [word("a x")], 2)
        assert cert.M == 4 and cert.chosen == (2, 4)
        assert cert.t == pi({0: 1, 2: 4})
        assert brute_fix(SWAP, cert.t, word("a x"), 64) == {0} == brute_fix(SWAP, pi({0: 1}), word("a x"), 64)

    def test_pure_power_example(self):
        cert = extend_domain(SWAP, pi({}), [word("x")], 0)
        assert cert.t == pi({0: 1})

    def test_no_words_least_legal(self):
        cert = extend_domain(SWAP, pi({}), [], 5)
        assert cert.chosen == (5, 0)

    def test_below_M_can_fail(self):
        # 2 -> 3 makes 2 a new fixpoint of a x
        s = pi({0: 1})
        assert not verify_preserved(SWAP, s, s.extend(2, 3), [word("a x")], VERIFY_BOUND)

    def test_certificate_line(self):
        line = extend_domain(SWAP, pi({0: 1}), [word("a x")], 2).check().line()
        assert line == 'extend n=2 m=4 M=4 t={0->1,2->4} words=["a x"] bound=256 verdict=pass'

    def test_identity_is_preserved(self):
        s = pi({0: 1, 3: 2})
        assert verify_preserved(SWAP, s, s, [word("a x"), word("x")], 64)

    @settings(max_examples=40)
    @given(seeds)
    def test_window_of_successors(self, seed):
        rho, s, W0, n = random_extension_instance(random.Random(seed))
        cert = extend_domain(rho, s, W0, n)
        assert cert.chosen[1] == cert.M or not any(not is_nice(rho, w).is_pure_power() for w in W0)
        for m in range(cert.M, cert.M + 20):
            if m not in s.ran():
                assert verify_preserved(rho, s, s.extend(n, m), W0, 128)


class TestExtendRange:
    def test_dual_pure_power(self):
        cert = extend_range(SWAP, pi({}), [word("x^-1")], 0)
        assert cert.chosen == (1, 0) and cert.t == pi({1: 0})

    def test_mirror_of_block_example(self):
        s = pi({0: 1})
        dual = extend_domain(SWAP, s.inverse(), [perp(word("a x"))], 2)
        cert = extend_range(SWAP, s, [word("a x")], 2)
        assert cert.t == dual.t.inverse()
        assert cert.chosen == (dual.chosen[1], 2)

    @settings(max_examples=30)
    @given(seeds)
    def test_transpose_of_domain_extension(self, seed):
        rho, s, W0, m = random_extension_instance(random.Random(seed))
        if m in s.ran():
            return
        cert = extend_range(rho, s, W0, m)
        dual = extend_domain(rho, s.inverse(), [perp(w) for w in W0], m)
        assert cert.t == dual.t.inverse()
        assert verify_preserved(rho, s, cert.t, W0, 128)


class TestNiceWords:
    def test_first_words(self):
        assert [str(w) for w in nice_words(SWAP, 4)] == ["x", "x^-1", "a x", "a x^-1"]

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            nice_words(SWAP, 1000, max_len=2)

    def test_exact_fixpoints_match_scan(self):
        f = pi({0: 1, 2: 4, 5: 3})
        for w in nice_words(SWAP, 12):
            assert exact_fixpoints(SWAP, f, w) == brute_fix(SWAP, f, w, 64)


class TestMcgEngine:
    def test_zero_rounds(self):
        trace = mcg_eliminate(SWAP, TOP, fixtures.mcg_fixture(), 0)
        assert trace.rounds == [] and trace.ok

    def test_one_round(self):
        g = fixtures.mcg_fixture()
        trace = mcg_eliminate(SWAP, TOP, g, 1)
        assert trace.ok
        r = trace.rounds[0]
        assert 0 in r.f.dom() and 0 in r.f.ran()
        for l, v in r.agreements:
            assert r.f(l) == v
            assert C.decide_value(r.condition, g, l) == C.Forced(v)

    def test_two_rounds_grow(self):
        trace = mcg_eliminate(SWAP, TOP, fixtures.mcg_fixture(), 2)
        assert trace.ok
        f0, f1 = trace.rounds[0].f, trace.rounds[1].f
        assert f0.issubset(f1) and len(f1) > len(f0)
        assert P.leq_n(trace.rounds[1].condition, trace.rounds[0].condition, 1)
        assert trace.lines()[-1] == "mcg verdict=pass"

    def test_constant_code(self):
        with pytest.raises(PremiseFailure):
            mcg_eliminate(SWAP, TOP, fixtures.constant_fixture(), 1)

    def test_deterministic_lines(self):
        a = mcg_eliminate(SWAP, TOP, fixtures.mcg_fixture(), 1).lines()
        b = mcg_eliminate(SWAP, TOP, fixtures.mcg_fixture(), 1).lines()
        assert a == b and all(" verdict=" in l or l.startswith("round ") for l in a)
