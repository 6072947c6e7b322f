"""Seeded random instance generators.

Every generator takes a :class:`random.Random` so runs are reproducible;
the property suites and the CLI ``--seed`` flag both draw from here.
"""
from __future__ import annotations

import random
from typing import Optional, Sequence

from . import codes as C
from .formulas.ast import Add, And, CodeOut, Cmp, Formula, Not, Num, Or, Param, Quant, Term, Var
from .formulas.semantics import EPReal
from .perms import EAPermutation, PartialInjection
from .products import ProductCondition
from .trees import TreeCondition
from .words import Representation, Word


def random_tree(rng: random.Random, max_depth: int = 4, max_leaves: int = 4) -> TreeCondition:
    leaves = [""]
    for _ in range(rng.randint(0, 6)):
        i = rng.randrange(len(leaves))
        s = leaves[i]
        if len(s) >= max_depth:
            continue
        if rng.random() < 0.5 and len(leaves) < max_leaves:
            leaves[i:i + 1] = [s + "0", s + "1"]
        else:
            leaves[i] = s + rng.choice("01")
    return TreeCondition(tuple(leaves))


def random_condition(rng: random.Random, max_coords: int = 3, max_depth: int = 4) -> ProductCondition:
    coords = rng.sample(range(max_coords + 1), rng.randint(0, max_coords))
    return ProductCondition.make({a: random_tree(rng, max_depth) for a in coords})


def random_code(rng: random.Random, depth: int, max_value: int = 3) -> C.Code:
    """A monotone code: each square extends the output of its smaller slice."""
    memo: dict[C.Matrix, tuple[int, ...]] = {(): ()}

    def out(m: C.Matrix) -> tuple[int, ...]:
        if m not in memo:
            n = len(m)
            extra = tuple(rng.randint(0, max_value) for _ in range(rng.randint(1, 2)))
            memo[m] = out(C.square(m, n - 1)) + extra
        return memo[m]

    return C.Code.from_function(depth, out, bound=depth)


def random_epreal(rng: random.Random, max_len: int = 3, max_value: int = 3) -> EPReal:
    prefix = tuple(rng.randint(0, max_value) for _ in range(rng.randint(0, max_len)))
    period = tuple(rng.randint(0, max_value) for _ in range(rng.randint(1, max_len)))
    return EPReal(prefix, period)


class FormulaGenerator:
    """Random closed formulas with a bounded number of quantifiers.

    ``index_cap`` bounds every index that may reach a code output, which keeps
    the share of out-of-output lookups low for codes of matching depth.
    """

    def __init__(
        self,
        rng: random.Random,
        n_codes: int = 1,
        n_params: int = 1,
        max_quantifiers: int = 2,
        max_bound: int = 3,
        index_cap: Optional[int] = None,
        names: tuple[str, ...] = ("n", "m", "k"),
    ):
        self.rng = rng
        self.n_codes = n_codes
        self.n_params = n_params
        self.max_quantifiers = max_quantifiers
        self.max_bound = max_bound
        self.index_cap = index_cap
        self.names = names

    def term(self, scope: list[tuple[str, int]], depth: int = 0) -> Term:
        rng = self.rng
        r = rng.random()
        if r < 0.35 and self.n_codes:
            return CodeOut(rng.randrange(self.n_codes), self.index(scope, depth))
        if r < 0.6 and self.n_params:
            return Param(rng.randrange(self.n_params), self.index(scope, depth))
        if r < 0.8 and scope:
            name, _ = rng.choice(scope)
            return Var(name) if rng.random() < 0.7 else Add(Var(name), rng.randint(0, 2))
        return Num(rng.randint(0, 3))

    def index(self, scope: list[tuple[str, int]], depth: int = 0) -> Term:
        rng = self.rng
        cap = self.index_cap
        # a variable bounded by b takes values up to b - 1
        fitting = [(v, b) for v, b in scope if cap is None or b - 1 <= cap]
        if fitting and rng.random() < 0.7:
            name, b = rng.choice(fitting)
            slack = 2 if cap is None else cap - (b - 1)
            if slack and rng.random() < 0.3:
                return Add(Var(name), rng.randint(1, slack))
            return Var(name)
        if cap is None and depth < 2 and rng.random() < 0.15:
            return self.term(scope, depth + 1)
        return Num(rng.randint(0, 3 if cap is None else cap))

    def formula(self, scope: Optional[list[tuple[str, int]]] = None, budget: Optional[int] = None, depth: int = 0) -> Formula:
        rng = self.rng
        scope = list(scope or [])
        budget = self.max_quantifiers if budget is None else budget
        r = rng.random()
        if depth >= 3 or r < 0.3:
            return Cmp(rng.choice(("=", "!=", "<", "<=")), self.term(scope), self.term(scope))
        if r < 0.45:
            return Not(self.formula(scope, budget, depth + 1))
        if r < 0.7 or budget == 0:
            left_budget = rng.randint(0, budget)
            cls = And if rng.random() < 0.5 else Or
            return cls(
                self.formula(scope, left_budget, depth + 1),
                self.formula(scope, budget - left_budget, depth + 1),
            )
        name = next((v for v in self.names if v not in dict(scope)), f"x{len(scope)}")
        b = rng.randint(1, self.max_bound)
        bound: Term = Num(b)
        if scope and rng.random() < 0.2:
            outer, ob = rng.choice(scope)
            bound = Add(Var(outer), 1)
            b = ob + 1
        kind = rng.choice(("forall", "exists"))
        return Quant(kind, name, bound, self.formula(scope + [(name, b)], budget - 1, depth + 1))


def random_formula(rng: random.Random, **kw) -> Formula:
    return FormulaGenerator(rng, **kw).formula()


def forcing_instance(rng: random.Random):
    """One instance for the forcing equivalence suite: (p, codes, params, formula)."""
    depth = rng.randint(1, 3)
    codes = [random_code(rng, depth)]
    params = [random_epreal(rng)]
    p = random_condition(rng, max_coords=2, max_depth=3)
    gen = FormulaGenerator(rng, max_quantifiers=2, max_bound=3, index_cap=depth - 1)
    return p, codes, params, gen.formula()


def random_eaperm(rng: random.Random, max_period: int = 4, max_threshold: int = 8) -> EAPermutation:
    """A random eventually-affine permutation; offsets sum to zero so it is onto."""
    d = rng.randint(1, max_period)
    target = list(range(d))
    rng.shuffle(target)
    shifts = [rng.choice((-1, 0, 0, 1)) for _ in range(d)]
    shifts[-1] -= sum(shifts)
    offsets = [target[r] - r + d * shifts[r] for r in range(d)]
    N = rng.randint(0, max_threshold)
    # raise the threshold until no class is sent below zero
    while any(N + ((r - N) % d) + offsets[r] < 0 for r in range(d)):
        N += 1
    missed = []
    for r in range(d):
        start = N + ((r - N) % d) + offsets[r]
        missed += range(target[r], start, d)
    rng.shuffle(missed)
    return EAPermutation(N, d, tuple(offsets), tuple(missed))


def random_word(rng: random.Random, alphabet, max_len: int, min_len: int = 0) -> Word:
    """A random reduced word over ``alphabet`` (which may include ``x``)."""
    letters: list = []
    for _ in range(rng.randint(min_len, max_len)):
        options = [(g, e) for g in alphabet for e in (1, -1)]
        if letters:
            options.remove((letters[-1][0], -letters[-1][1]))
        letters.append(rng.choice(options))
    return Word(tuple(letters))


def random_representation(rng: random.Random, alphabet=("a", "b"), x_total: bool = True, **kw) -> Representation:
    perms = {g: random_eaperm(rng, **kw) for g in alphabet}
    xv = random_eaperm(rng, **kw) if x_total else None
    return Representation.make(perms, xv)


def random_partial_injection(rng: random.Random, size: int, universe: int = 16) -> PartialInjection:
    dom = rng.sample(range(universe), size)
    ran = rng.sample(range(universe), size)
    return PartialInjection.make(dict(zip(dom, ran)))


def _narrow(rng: random.Random, cell: ProductCondition, coords: Sequence[int], extra: int = 2) -> ProductCondition:
    """Restrict one random coordinate of ``cell`` to a random node a little above its stem."""
    from . import trees

    a = rng.choice(list(coords))
    T = cell[a]
    depth = len(trees.stem(T)) + rng.randint(0, extra)
    node = rng.choice(trees.nodes_at(T, depth))
    return cell.replace(a, trees.restrict_node(T, node))


def fusion_sets(length: int) -> list[frozenset[int]]:
    """``F_k``: coordinate 0 from the start, coordinate 1 from step 2 on."""
    return [frozenset({0} if k < 2 else {0, 1}) for k in range(length - 1)]


def random_fusion_chain(rng: random.Random, length: int = 5) -> tuple[list[ProductCondition], list[frozenset[int]]]:
    """A chain with ``p_{k+1} <=_{F_k, k} p_k``, built by refining every cell at each step."""
    from . import products as P

    Fs = fusion_sets(length)
    chain = [random_condition(rng, max_coords=3, max_depth=3)]
    for k, F in enumerate(Fs):
        coords = sorted(F | {2})
        chain.append(P.amalgamate_dense(chain[-1], F, k, lambda cell, sigma: _narrow(rng, cell, coords)))
    return chain, Fs


def random_nice_word(rng: random.Random, rho: Representation, max_degree: int = 3, tries: int = 50) -> Word:
    """A nice word whose A-blocks have finitely many fixpoints under ``rho``."""
    from .words import word_perm

    degree = rng.randint(1, max_degree)
    if rng.random() < 0.3:
        return Word(((X_LETTER, rng.choice((1, -1))),) * degree)
    letters: list = []
    left = degree
    while left:
        k = rng.randint(1, left)
        left -= k
        for _ in range(tries):
            u = random_word(rng, rho.alphabet, 2, 1)
            p = word_perm(rho, u)
            if not p.is_identity() and p.has_finite_fix():
                break
        else:
            raise ValueError("no A-block with finitely many fixpoints found")
        letters += list(u.letters) + [(X_LETTER, rng.choice((1, -1)))] * k
    return Word(tuple(letters))


X_LETTER = "x"


def cofinitary_representation(rng: random.Random, alphabet=("a", "b")) -> Representation:
    """Letters mapped to fixpoint-free shifts of residue classes, so short blocks have finite fixpoints."""
    perms = {}
    for g in alphabet:
        while True:
            p = random_eaperm(rng, max_period=4, max_threshold=6)
            if p.has_finite_fix() and not p.is_identity():
                perms[g] = p
                break
    return Representation.make(perms)


def random_extension_instance(rng: random.Random):
    """``(rho, s, W0, n)`` with ``|s| <= 4``, ``|W0| <= 3`` and x-degree at most 3."""
    while True:
        rho = cofinitary_representation(rng)
        try:
            W0 = [random_nice_word(rng, rho) for _ in range(rng.randint(0, 3))]
        except ValueError:
            continue
        s = random_partial_injection(rng, rng.randint(0, 4), universe=12)
        n = rng.choice([k for k in range(14) if k not in s.dom()])
        return rho, s, W0, n


# --- family backends ------------------------------------------------------


def random_coded_set(rng: random.Random, max_period: int = 4, max_threshold: int = 5, finite_rate: float = 0.1):
    from .families.backends import CodedSet

    d = rng.randint(1, max_period)
    residues = frozenset(r for r in range(d) if rng.random() < 0.5)
    if not residues and rng.random() > finite_rate:
        residues = frozenset({rng.randrange(d)})
    N = rng.randint(0, max_threshold)
    low = frozenset(x for x in range(N) if rng.random() < 0.4)
    return CodedSet(N, d, residues, low)


def random_periodic_tree(rng: random.Random, values: int = 3, max_len: int = 3):
    from .families.backends import PeriodicTree

    def level():
        return frozenset(v for v in range(values) if rng.random() < 0.5) or frozenset({rng.randrange(values)})

    return PeriodicTree(tuple(level() for _ in range(rng.randint(0, max_len))), tuple(level() for _ in range(rng.randint(1, 2))))


def random_backend_value(rng: random.Random, kind: type):
    from .families.backends import CodedSet, PeriodicTree

    if kind is CodedSet:
        return random_coded_set(rng)
    if kind is PeriodicTree:
        return random_periodic_tree(rng)
    if kind is EAPermutation:
        return random_eaperm(rng, max_period=3, max_threshold=4)
    return random_epreal(rng, max_len=2, max_value=3)


def random_family(rng: random.Random, t, max_size: int = 3):
    """A family of distinct members of ``t``'s backend; positives and negatives both occur."""
    from .families.registry import FamilyInstance

    members: list = []
    for _ in range(rng.randint(0, max_size) * 3):
        if len(members) >= max_size:
            break
        v = random_backend_value(rng, t.member_backend)
        if v not in members:
            members.append(v)
    return FamilyInstance(tuple(members))
