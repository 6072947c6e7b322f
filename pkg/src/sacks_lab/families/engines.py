"""Finite-round elimination engines for e.d. families and a.d. families.

Both engines run the two-phase fusion argument: the first phase reads off,
for each family member, a bound past which the named real ``g`` stays away
from that member; the second phase collects values of ``g`` decided on
every cell and builds the new family member from them.  Every round records
its checks so a trace can be audited line by line.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence

from .. import codes as C
from .. import products as P
from ..errors import BackendMismatch, BudgetExceeded, InvalidCode, PremiseFailure
from ..formulas import ast as A
from ..formulas.forcing import forces
from ..formulas.semantics import EPReal
from ..products import ProductCondition
from ..tracelog import Trace
from .backends import CodedSet, intersection
from .registry import FamilyInstance, builtin_type, is_of_type


@dataclass
class EliminationRound:
    tag: str
    condition: ProductCondition
    extracted: dict[str, Any]
    checks: Trace = field(default_factory=Trace)
    # (suitable function, index, value) for every point forced to agree with g
    agreements: list = field(default_factory=list)


@dataclass
class EliminationTrace:
    rounds: list[EliminationRound] = field(default_factory=list)
    result: Any = None
    final: Trace = field(default_factory=Trace)

    @property
    def ok(self) -> bool:
        return all(r.checks.ok for r in self.rounds) and self.final.ok

    def lines(self) -> list[str]:
        out = []
        for r in self.rounds:
            fields = " ".join(f"{k}={_flat(v)}" for k, v in r.extracted.items())
            out.append(f"{r.tag} {fields}".rstrip())
            out.extend(r.checks.lines())
        out.extend(self.final.lines())
        out.append("eliminate verdict=" + ("pass" if self.ok else "fail"))
        return out


def _flat(v: Any) -> str:
    return str(v).replace(" ", "")


def _outputs(p: ProductCondition, g: C.Code) -> dict[C.Matrix, tuple[int, ...]]:
    return {m: C.eval_star(g, m) for m in C.branch_matrices(p, g.depth)}


def _window(p: ProductCondition, g: C.Code) -> int:
    return min(len(o) for o in _outputs(p, g).values())


def _require_valid(g: C.Code) -> None:
    if not C.validate_code(g).ok:
        raise InvalidCode("g fails validation")


def branch_injective(cell: ProductCondition, g: C.Code) -> None:
    """Different branches through ``cell`` must give different outputs."""
    seen: dict[tuple[int, ...], C.Matrix] = {}
    for m, out in _outputs(cell, g).items():
        if out in seen:
            raise PremiseFailure(f"g gives the same output on the branches {list(seen[out])} and {list(m)}")
        seen[out] = m


def deciding_box(cell: ProductCondition, g: C.Code, indices: Sequence[int]) -> tuple[ProductCondition, dict[int, int]]:
    """The coarsest, leftmost box below ``cell`` on which ``g`` is constant at ``indices``."""
    outs = _outputs(cell, g)
    top = max(indices, default=-1)
    if any(len(o) <= top for o in outs.values()):
        raise BudgetExceeded(f"g is decided only below {min(len(o) for o in outs.values())}, need index {top}")
    for d in range(g.depth + 1):
        groups: dict[C.Matrix, set[tuple[int, ...]]] = {}
        for m, o in outs.items():
            groups.setdefault(C.square(m, d), set()).add(tuple(o[i] for i in indices))
        for key, vals in groups.items():
            if len(vals) == 1:
                return P.restrict_box(cell, key), dict(zip(indices, vals.pop()))
    raise BudgetExceeded(f"no box of depth <= {g.depth} decides g on {len(indices)} indices")


def first_decided(
    cell: ProductCondition, g: C.Code, wanted: Callable[[int], bool]
) -> Optional[tuple[ProductCondition, int, int]]:
    """The coarsest box below ``cell`` and least index ``i`` with a decided ``g(i)`` satisfying ``wanted``."""
    outs = _outputs(cell, g)
    L = min(len(o) for o in outs.values())
    for d in range(g.depth + 1):
        groups: dict[C.Matrix, list[tuple[int, ...]]] = {}
        for m, o in outs.items():
            groups.setdefault(C.square(m, d), []).append(o)
        for key, members in groups.items():
            for i in range(L):
                vals = {o[i] for o in members}
                if len(vals) == 1 and wanted(b := vals.pop()):
                    return P.restrict_box(cell, key), i, b
    return None


def _agreement_claim(points: Sequence[tuple[int, int]]) -> A.Formula:
    return A.disj(*[A.Cmp("=", A.CodeOut(0, A.Num(l)), A.Num(v)) for l, v in points])


# --- eventually different families ---------------------------------------


def _separation_bound(cell: ProductCondition, g: C.Code, f: EPReal, L: int) -> int:
    """Least ``k`` with ``g(l) != f(l)`` for ``k < l < L`` on every branch of ``cell``."""
    k = 0
    for m, out in _outputs(cell, g).items():
        for l in range(L):
            if out[l] == f(l):
                if l >= L // 2:
                    raise PremiseFailure(f"g meets the member at index {l} on branch {list(m)}, too late to separate")
                k = max(k, l)
    return k


def _separation_statement(L: int, k: int) -> A.Formula:
    l = A.Var("l")
    body = A.Or(A.Cmp("<=", l, A.Num(k)), A.Cmp("!=", A.CodeOut(0, l), A.Param(0, l)))
    return A.Quant("forall", "l", A.Num(L), body)


def least_avoiding(members: Sequence[EPReal], l: int) -> int:
    taken = {f(l) for f in members}
    return next(v for v in range(len(taken) + 1) if v not in taken)


def complete_real(h: dict[int, int], members: Sequence[EPReal]) -> EPReal:
    """Extend a finite ``h`` on an initial segment to a total eventually periodic real.

    Past ``h`` every value is the least one avoiding all members, which is
    periodic once the members are.
    """
    import math

    end = max(h, default=-1) + 1
    start = max([end] + [len(f.prefix) for f in members])
    period = math.lcm(*[len(f.period) for f in members]) if members else 1
    prefix = [h[l] if l in h else least_avoiding(members, l) for l in range(start)]
    return EPReal(tuple(prefix), tuple(least_avoiding(members, start + i) for i in range(period)))


def ed_eliminate(F: FamilyInstance, p: ProductCondition, g: C.Code, rounds: int) -> EliminationTrace:
    """Build a new real agreeing with ``g`` infinitely often and eventually different from ``F``.

    The first phase spends one round per member; the second runs ``rounds``
    rounds, each defining the new real on the next interval.  Raises
    :class:`BudgetExceeded` (with the partial trace as ``exc.trace``) when the
    code depth cannot decide an interval.
    """
    trace = EliminationTrace()
    if rounds == 0:
        return trace
    _require_valid(g)
    members = list(F.members)
    for f in members:
        if not isinstance(f, EPReal):
            raise BackendMismatch(f"member {f!r} is not an eventually periodic real")
    try:
        return _ed_run(trace, members, p, g, rounds)
    except BudgetExceeded as exc:
        exc.trace = trace
        raise


def _ed_run(trace: EliminationTrace, members: list[EPReal], p: ProductCondition, g: C.Code, rounds: int) -> EliminationTrace:
    L = _window(p, g)
    cur = p
    ks: list[int] = []
    for n, f in enumerate(members):
        found: list[int] = []

        def bound(cell, sigma, f=f):
            found.append(_separation_bound(cell, g, f, L))
            return cell

        nxt = P.amalgamate_dense(cur, P.standard_F(n), n, bound)
        k = max(found)
        ks.append(k)
        rnd = EliminationRound("ed.separate", nxt, {"member": n, "k": k, "window": L})
        rnd.checks.add("ed.k", forces(nxt, [g], [f], _separation_statement(L, k)).kind == "ForcedTrue", member=n, k=k)
        rnd.checks.add("ed.fusion", P.leq_n(nxt, cur, n), n=n)
        trace.rounds.append(rnd)
        cur = nxt

    k_all = max(ks, default=0)
    h: dict[int, int] = {}
    start, prev = 0, 0
    for n in range(rounds):
        sigmas = P.suitable_functions(cur, P.standard_F(n), n)
        N = len(sigmas)
        k_n = ks[n] if n < len(ks) else 0
        # the agreement points sit at the top of the interval, past every separation bound
        size = max(k_n + 1, N, prev + 1, k_all + 1 + N - start)
        I = list(range(start, start + size))
        points = I[size - N:]
        decided: list[dict[int, int]] = []

        def decide(cell, sigma):
            branch_injective(cell, g)
            box, vals = deciding_box(cell, g, I)
            decided.append(vals)
            return box

        nxt = P.amalgamate_dense(cur, P.standard_F(n), n, decide)
        h_n = {l: decided[i][l] for i, l in enumerate(points)}
        for l in I:
            h_n.setdefault(l, least_avoiding(members, l))
        h.update(h_n)
        agreements = [(l, h_n[l]) for l in points]
        rnd = EliminationRound("ed.interval", nxt, {"n": n, "dom": f"[{start},{start + size})", "cells": N})
        rnd.agreements = [(sigma, l, v) for sigma, (l, v) in zip(sigmas, agreements)]
        c = rnd.checks
        c.add("ed.1", start == (max(h) + 1 - size) and size > prev, start=start, size=size)
        c.add("ed.2", k_n <= max(I), k=k_n, top=max(I))
        clashes = [(m, l) for m, f in enumerate(members) for l in I if f(l) == h_n[l]]
        c.add("ed.3", not clashes, members=len(members), clashes=clashes[:3])
        for sigma, (l, v) in zip(sigmas, agreements):
            verdict = C.decide_value(P.restrict_suitable(nxt, sigma), g, l)
            c.add("ed.4", verdict == C.Forced(v), cell=str(sigma), l=l, value=v)
        c.add("ed.4.forced", forces(nxt, [g], [], _agreement_claim(agreements)).kind == "ForcedTrue", points=len(agreements))
        c.add("ed.fusion", P.leq_n(nxt, cur, n), n=n)
        trace.rounds.append(rnd)
        start, prev, cur = start + size, size, nxt

    total = complete_real(h, members)
    trace.result = total
    trace.final.add("ed.total", total not in members and is_of_type(builtin_type("med"), FamilyInstance(tuple(members) + (total,))),
                    prefix=list(total.prefix)[:12], period=list(total.period))
    return trace


# --- almost disjoint families -------------------------------------------


def split_in_two(C_: CodedSet) -> tuple[CodedSet, CodedSet]:
    """Partition an infinite periodic set into two infinite periodic halves."""
    if not C_.is_infinite():
        raise PremiseFailure("the complement of the family's union is finite")
    d = C_.period * (1 if len(C_.residues) > 1 else 2)
    classes = sorted(r for r in range(d) if (r % C_.period) in C_.residues)
    D = CodedSet(C_.threshold, d, frozenset(classes[0::2]), C_.low)
    return D, C_ - D


def _entry_bound(cell: ProductCondition, g: C.Code, sets: Sequence[CodedSet], L: int) -> int:
    """Least ``k`` with no value of ``g`` at or above ``k`` inside the sets, on every branch of ``cell``."""
    k = 0
    for m, out in _outputs(cell, g).items():
        for i in range(L):
            if any(out[i] in s for s in sets):
                if i >= L // 2:
                    raise PremiseFailure(f"g enters the family at index {i} on branch {list(m)}, too late to bound")
                k = max(k, out[i] + 1)
    return k


def _entry_statement(L: int, k: int) -> A.Formula:
    i = A.Var("i")
    body = A.Or(A.Cmp("<", A.CodeOut(0, i), A.Num(k)), A.Cmp("=", A.Param(0, A.CodeOut(0, i)), A.Num(0)))
    return A.Quant("forall", "i", A.Num(L), body)


def _indicator(sets: Sequence[CodedSet]):
    return lambda x: int(any(x in s for s in sets))


def _check_increasing(p: ProductCondition, g: C.Code) -> None:
    for m, out in _outputs(p, g).items():
        if any(a >= b for a, b in zip(out, out[1:])):
            raise PremiseFailure(f"g is not strictly increasing on branch {list(m)}")


def ad_eliminate(
    A_: FamilyInstance, p: ProductCondition, g: C.Code, rounds: int, branch: str = "finite"
) -> EliminationTrace:
    """Find a set almost disjoint from ``A_`` that meets the set coded by ``g`` again in every round.

    ``branch="finite"`` splits the complement of the union in two and forces
    new points of ``g`` into one half; ``branch="infinite"`` bounds each
    member's intersection with ``g`` first and then collects fresh blocks.
    """
    trace = EliminationTrace()
    if rounds == 0:
        return trace
    if branch not in ("finite", "infinite"):
        raise ValueError(f"branch must be 'finite' or 'infinite', not {branch!r}")
    _require_valid(g)
    sets = list(A_.members)
    for s in sets:
        if not isinstance(s, CodedSet):
            raise BackendMismatch(f"member {s!r} is not a coded set")
    _check_increasing(p, g)
    try:
        if branch == "finite":
            return _ad_finite(trace, sets, p, g, rounds)
        return _ad_infinite(trace, sets, p, g, rounds)
    except BudgetExceeded as exc:
        exc.trace = trace
        raise


def _collect_round(cur: ProductCondition, g: C.Code, n: int, wanted: Callable[[int], bool]):
    """One fusion round giving each cell a decided value of ``g`` accepted by ``wanted``."""
    found: list[tuple[P.SuitableFunction, int, int]] = []

    def pick(cell, sigma):
        hit = first_decided(cell, g, wanted)
        if hit is None:
            raise BudgetExceeded(f"cell {sigma} decides no suitable value of g within depth {g.depth}")
        box, i, b = hit
        found.append((sigma, i, b))
        return box

    return P.amalgamate_dense(cur, P.standard_F(n), n, pick), found


def _record_points(rnd: EliminationRound, nxt: ProductCondition, cur: ProductCondition, g: C.Code, n: int, found, good) -> None:
    rnd.agreements = list(found)
    for sigma, i, b in found:
        verdict = C.decide_value(P.restrict_suitable(nxt, sigma), g, i)
        rnd.checks.add("ad.point", verdict == C.Forced(b) and good(b), cell=str(sigma), index=i, value=b)
    claim = _agreement_claim([(i, b) for _, i, b in found])
    rnd.checks.add("ad.forced", forces(nxt, [g], [], claim).kind == "ForcedTrue", points=len(found))
    rnd.checks.add("ad.fusion", P.leq_n(nxt, cur, n), n=n)


def _ad_finite(trace: EliminationTrace, sets: list[CodedSet], p: ProductCondition, g: C.Code, rounds: int) -> EliminationTrace:
    L = _window(p, g)
    rest = intersection([s.complement() for s in sets])
    D, E = split_in_two(rest)
    k = _entry_bound(p, g, sets, L)
    rnd = EliminationRound("ad.split", p, {"D": D, "E": E, "k": k})
    rnd.checks.add("ad.k", forces(p, [g], [_indicator(sets)], _entry_statement(L, k)).kind == "ForcedTrue", k=k)
    rnd.checks.add("ad.partition", (D & E).is_empty() and (D | E) == rest and D.is_infinite() and E.is_infinite())
    trace.rounds.append(rnd)

    cur, floor, half = p, k, None
    for n in range(rounds):
        options = [half] if half is not None else [("D", D), ("E", E)]
        for name, H in options:
            try:
                nxt, found = _collect_round(cur, g, n, lambda b, H=H: b >= floor and b in H)
            except BudgetExceeded:
                if half is None and name == "D":
                    continue
                raise
            half = (name, H)
            break
        name, H = half
        rnd = EliminationRound("ad.collect", nxt, {"n": n, "half": name, "points": sorted({b for _, _, b in found})})
        _record_points(rnd, nxt, cur, g, n, found, lambda b, H=H, fl=floor: b in H and b >= fl)
        trace.rounds.append(rnd)
        floor = max(b for _, _, b in found) + 1
        cur = nxt
    name, H = half
    trace.result = H
    trace.final.add("ad.family", is_of_type(builtin_type("mad"), FamilyInstance(tuple(sets) + (H,))), half=name, set=str(H))
    return trace


def _ad_infinite(trace: EliminationTrace, sets: list[CodedSet], p: ProductCondition, g: C.Code, rounds: int) -> EliminationTrace:
    L = _window(p, g)
    cur = p
    ks: list[int] = []
    for n, A_n in enumerate(sets):
        found: list[int] = []

        def bound(cell, sigma, A_n=A_n):
            found.append(_entry_bound(cell, g, [A_n], L))
            return cell

        nxt = P.amalgamate_dense(cur, P.standard_F(n), n, bound)
        ks.append(max(found))
        rnd = EliminationRound("ad.bound", nxt, {"member": n, "k": ks[-1]})
        rnd.checks.add("ad.k", forces(nxt, [g], [_indicator([A_n])], _entry_statement(L, ks[-1])).kind == "ForcedTrue", member=n)
        rnd.checks.add("ad.fusion", P.leq_n(nxt, cur, n), n=n)
        trace.rounds.append(rnd)
        cur = nxt

    blocks: list[set[int]] = []
    for n in range(rounds):
        K = max(ks[:n] + [max(b) + 1 for b in blocks] + [0])
        nxt, found = _collect_round(cur, g, n, lambda b, K=K: b >= K)
        a_n = {b for _, _, b in found}
        rnd = EliminationRound("ad.block", nxt, {"n": n, "K": K, "block": sorted(a_n)})
        _record_points(rnd, nxt, cur, g, n, found, lambda b, K=K: b >= K)
        hits = [(m, b) for m in range(min(n, len(sets))) for b in a_n if b in sets[m]]
        overlap = [b for prev in blocks for b in a_n & prev]
        rnd.checks.add("ad.disjoint", not hits and not overlap, earlier_members=min(n, len(sets)), hits=hits[:3])
        trace.rounds.append(rnd)
        blocks.append(a_n)
        cur = nxt
    trace.result = sorted(set().union(*blocks))
    return trace
