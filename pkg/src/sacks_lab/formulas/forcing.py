"""Deciding formulas below product conditions.

Truth below a condition is truth on every branch matrix through it at the
shared code depth.  :func:`refine_to_decide` follows the inductive
construction: atoms split on the coarsest deciding box, existential
quantifiers search for the least witness, universal quantifiers run fusion
rounds over suitable-function cells.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .. import codes as C
from .. import products as P
from ..errors import BudgetExceeded, IndexBeyondOutput
from ..products import ProductCondition
from .ast import And, Cmp, Formula, Not, Or, Quant
from .semantics import Real, eval_formula, eval_term


@dataclass(frozen=True)
class ForceVerdict:
    kind: str  # ForcedTrue, ForcedFalse, Neither, BudgetExceeded
    q_true: Optional[ProductCondition] = None
    q_false: Optional[ProductCondition] = None
    reason: str = ""

    def __str__(self) -> str:
        return self.kind

    def to_json(self) -> dict:
        out: dict = {"verdict": self.kind}
        if self.q_true is not None:
            out["q_true"] = self.q_true.to_json()
        if self.q_false is not None:
            out["q_false"] = self.q_false.to_json()
        if self.reason:
            out["reason"] = self.reason
        return out


def shared_depth(codes: Sequence[C.Code]) -> int:
    depths = {c.depth for c in codes}
    if len(depths) > 1:
        raise ValueError(f"codes must share one depth, got {sorted(depths)}")
    return depths.pop() if depths else 0


class _Context:
    """Caches code outputs per branch matrix for one (codes, params) pair."""

    def __init__(self, codes: Sequence[C.Code], params: Sequence[Real]):
        self.codes = list(codes)
        self.params = list(params)
        self.K = shared_depth(codes)
        self._outs: dict[C.Matrix, list[tuple[int, ...]]] = {}

    def outs(self, m: C.Matrix) -> list[tuple[int, ...]]:
        if m not in self._outs:
            self._outs[m] = [C.eval_star(c, m) for c in self.codes]
        return self._outs[m]

    def matrices(self, p: ProductCondition) -> list[C.Matrix]:
        return C.branch_matrices(p, self.K)

    def truth(self, phi: Formula, m: C.Matrix, env: Mapping[str, int]) -> bool:
        return eval_formula(phi, self.outs(m), self.params, env)

    def uniform(self, phi: Formula, p: ProductCondition, env: Mapping[str, int]) -> Optional[bool]:
        values = {self.truth(phi, m, env) for m in self.matrices(p)}
        return values.pop() if len(values) == 1 else None

    def boxes(self, p: ProductCondition, phi: Formula, env: Mapping[str, int]):
        """Yield ``(d, box, value)`` for uniform boxes, coarsest first, leftmost first."""
        mats = self.matrices(p)
        truth = {m: self.truth(phi, m, env) for m in mats}
        for d in range(self.K + 1):
            groups: dict[C.Matrix, set[bool]] = {}
            for m in mats:
                groups.setdefault(C.square(m, d), set()).add(truth[m])
            for key, vals in groups.items():
                if len(vals) == 1:
                    yield d, P.restrict_box(p, key), next(iter(vals))


def forces(
    p: ProductCondition,
    codes: Sequence[C.Code],
    params: Sequence[Real],
    phi: Formula,
) -> ForceVerdict:
    """Whether ``p`` decides ``phi``; ``Neither`` carries refinements for both values."""
    ctx = _Context(codes, params)
    try:
        value = ctx.uniform(phi, p, {})
        if value is not None:
            return ForceVerdict("ForcedTrue" if value else "ForcedFalse")
        found: dict[bool, ProductCondition] = {}
        for _, box, v in ctx.boxes(p, phi, {}):
            found.setdefault(v, box)
            if len(found) == 2:
                break
    except IndexBeyondOutput as exc:
        return ForceVerdict("BudgetExceeded", reason=str(exc))
    return ForceVerdict("Neither", q_true=found[True], q_false=found[False])


def _decide(ctx: _Context, q: ProductCondition, phi: Formula, env: dict[str, int], rounds: int):
    value = ctx.uniform(phi, q, env)
    if value is not None:
        return q, value
    if isinstance(phi, Not):
        r, v = _decide(ctx, q, phi.body, env, rounds)
        return r, not v
    if isinstance(phi, (And, Or)):
        short = isinstance(phi, Or)  # value that settles the connective
        r, v = _decide(ctx, q, phi.left, env, rounds)
        if v == short:
            return r, v
        return _decide(ctx, r, phi.right, env, rounds)
    if isinstance(phi, Quant):
        bound = eval_term(phi.bound, [], ctx.params, env)
        if phi.kind == "exists":
            cur = q
            for i in range(bound):
                r, v = _decide(ctx, cur, phi.body, {**env, phi.var: i}, rounds)
                if v:
                    return r, True
                cur = r
            return cur, False
        return _forall_rounds(ctx, q, phi, env, bound, rounds)
    # atom: coarsest uniform box, preferring a true box at each coarseness
    best: dict[int, dict[bool, ProductCondition]] = {}
    for d, box, v in ctx.boxes(q, phi, env):
        best.setdefault(d, {}).setdefault(v, box)
    d = min(best)
    v = True if True in best[d] else False
    return best[d][v], v


def _forall_rounds(ctx: _Context, q: ProductCondition, phi: Quant, env, bound: int, rounds: int):
    cur = q
    used = 0
    for i in range(bound):
        inst = {**env, phi.var: i}
        if ctx.uniform(phi.body, cur, inst) is True:
            continue
        if used >= rounds:
            raise BudgetExceeded(f"forall {phi.var}: instance {i} needs a fusion round beyond the budget of {rounds}")
        n = used
        used += 1
        failed: list[ProductCondition] = []

        def choose(cell, sigma, inst=inst):
            if failed:
                return cell
            r, v = _decide(ctx, cell, phi.body, inst, rounds)
            if not v:
                failed.append(r)
                return cell
            return r

        nxt = P.amalgamate_dense(cur, P.standard_F(n), n, choose)
        if failed:
            return failed[0], False
        cur = nxt
    return cur, True


def refine_to_decide(
    q: ProductCondition,
    codes: Sequence[C.Code],
    params: Sequence[Real],
    phi: Formula,
    rounds: int,
) -> tuple[ProductCondition, bool]:
    """Find ``r <= q`` on which ``phi`` has one truth value, and that value.

    ``rounds`` bounds the fusion rounds spent by each universal quantifier;
    running out raises :class:`BudgetExceeded`, as does consulting a code
    output past its length.
    """
    ctx = _Context(codes, params)
    try:
        return _decide(ctx, q, phi, {}, rounds)
    except IndexBeyondOutput as exc:
        raise BudgetExceeded(str(exc)) from exc


def equivalence_check(
    p: ProductCondition,
    codes: Sequence[C.Code],
    params: Sequence[Real],
    phi: Formula,
    rounds: int = 3,
) -> bool:
    """Compare ``p`` forcing ``phi`` with the density clause over level-``K`` cells.

    The density clause asks, for each cell ``q`` of the level-``K`` antichain
    below ``p``, for some ``r <= q`` on which ``phi`` holds on every branch.
    ``refine_to_decide`` supplies ``r``; when it settles on false, the cell is
    searched exhaustively for a true box before the clause is declared to fail.
    """
    verdict = forces(p, codes, params, phi)
    if verdict.kind == "BudgetExceeded":
        raise BudgetExceeded(verdict.reason)
    ctx = _Context(codes, params)
    K = ctx.K
    clause = True
    for sigma in P.suitable_functions(p, P.standard_F(K), K):
        cell = P.restrict_suitable(p, sigma)
        r, v = refine_to_decide(cell, codes, params, phi, rounds)
        if not P.leq_product(r, cell):
            return False
        if v:
            continue
        if any(ctx.truth(phi, m, {}) for m in ctx.matrices(cell)):
            # a true branch gives a true box, so the clause still holds here
            continue
        clause = False
        break
    return (verdict.kind == "ForcedTrue") == clause
