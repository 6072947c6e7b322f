"""Extending partial injections without new fixpoints, and the m.c.g. engine.

Given a representation ``rho`` of the letters of ``A`` and a finite partial
injection ``s`` as the value of ``x``, :func:`extend_domain` adds one pair
``(n, m)`` so that no nice word in a finite list gains or loses a fixpoint.
:func:`mcg_eliminate` runs finitely many rounds of the fusion argument that
adds a new generator ``f`` agreeing infinitely often with a named real.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from . import codes as C
from . import products as P
from .errors import BudgetExceeded, InfiniteFix, InvalidCode, NotNice, PremiseFailure, PreservationFailure
from .formulas import ast as F
from .formulas.forcing import forces
from .perms import EAPermutation, PartialInjection
from .products import ProductCondition
from .tracelog import Check, Trace
from .words import Representation, Word, evaluate, is_nice, perp, reduced_words, word_perm

VERIFY_BOUND = 256


def _decompose(rho: Representation, w: Word):
    dec = is_nice(rho, w)
    if dec is None:
        raise NotNice(f"{w} is not a nice word for this representation")
    return dec


def bound_M(rho: Representation, s: PartialInjection, W0: Iterable[Word], n: int) -> int:
    """Least ``M`` above ``dom(s) ∪ ran(s) ∪ {n}``, its images under every
    A-block of the words and their inverses, and the blocks' fixpoints."""
    base = set(s.dom()) | set(s.ran()) | {n}
    covered = set(base)
    for w in W0:
        for u in _decompose(rho, w).a_blocks():
            pu = word_perm(rho, u)
            if not pu.has_finite_fix():
                raise InfiniteFix(f"the block {u} fixes cofinitely many points of some residue class")
            inv = pu.inverse()
            covered |= {pu(k) for k in base} | {inv(k) for k in base} | set(pu.fixpoints())
    return 1 + max(covered)


@dataclass(frozen=True)
class ExtensionCertificate:
    M: int
    chosen: tuple[int, int]
    t: PartialInjection
    checked_words: tuple[Word, ...]
    verified_bound: int

    def check(self) -> Check:
        n, m = self.chosen
        return Check("extend", True, (
            ("n", n), ("m", m), ("M", self.M), ("t", str(self.t)),
            ("words", [str(w) for w in self.checked_words]), ("bound", self.verified_bound),
        ))

    def to_json(self) -> dict:
        return {
            "M": self.M, "chosen": list(self.chosen), "t": self.t.to_json(),
            "checked_words": [str(w) for w in self.checked_words], "verified_bound": self.verified_bound,
        }


def _fixed(rho: Representation, x: PartialInjection, w: Word, k: int) -> bool:
    return evaluate(rho.with_x(x), w, k) == k


def verify_preserved(rho: Representation, s: PartialInjection, t: PartialInjection, W0: Iterable[Word], bound: int) -> bool:
    """Brute force: every word has the same fixpoints below ``bound`` under ``s`` and ``t``."""
    return all(_fixed(rho, s, w, k) == _fixed(rho, t, w, k) for w in W0 for k in range(bound))


def admissible_m(rho: Representation, s: PartialInjection, W0: Sequence[Word], n: int) -> int:
    """The value ``extend_domain`` assigns to ``n``."""
    if n in s.dom():
        raise ValueError(f"{n} is already in the domain")
    M = bound_M(rho, s, W0, n)
    if any(not _decompose(rho, w).is_pure_power() for w in W0):
        return M
    used = set(s.dom()) | set(s.ran()) | {n}
    return next(m for m in itertools.count() if m not in used)


def extend_domain(
    rho: Representation, s: PartialInjection, W0: Iterable[Word], n: int, bound: int = VERIFY_BOUND
) -> ExtensionCertificate:
    W0 = tuple(W0)
    M = bound_M(rho, s, W0, n)
    m = admissible_m(rho, s, W0, n)
    t = s.extend(n, m)
    if not verify_preserved(rho, s, t, W0, bound):
        raise PreservationFailure(f"adding {n}->{m} to {s} changes a fixpoint below {bound}")
    return ExtensionCertificate(M, (n, m), t, W0, bound)


def extend_range(
    rho: Representation, s: PartialInjection, W0: Iterable[Word], m: int, bound: int = VERIFY_BOUND
) -> ExtensionCertificate:
    """Put ``m`` into the range by extending the domain of ``s^-1`` for the swapped words."""
    W0 = tuple(W0)
    if m in s.ran():
        raise ValueError(f"{m} is already in the range")
    dual = extend_domain(rho, s.inverse(), [perp(w) for w in W0], m, bound)
    _, n = dual.chosen
    t = dual.t.inverse()
    if not verify_preserved(rho, s, t, W0, bound):
        raise PreservationFailure(f"adding {n}->{m} to {s} changes a fixpoint below {bound}")
    return ExtensionCertificate(dual.M, (n, m), t, W0, bound)


def nice_words(rho: Representation, count: int, max_len: int = 12) -> list[Word]:
    """The first ``count`` nice words, shortest first; subwords come earlier."""
    out: list[Word] = []
    if count <= 0:
        return out
    for w in reduced_words(tuple(rho.alphabet) + ("x",), max_len):
        if is_nice(rho, w) is not None:
            out.append(w)
            if len(out) == count:
                return out
    raise BudgetExceeded(f"fewer than {count} nice words of length <= {max_len}")


def exact_fixpoints(rho: Representation, f: PartialInjection, w: Word) -> frozenset[int]:
    """Fixpoints of a nice word under a finite ``f``.

    A nice word applies ``x^±1`` first, so every fixpoint lies in ``dom(f) ∪ ran(f)``.
    """
    return frozenset(k for k in f.dom() | f.ran() if _fixed(rho, f, w, k))


@dataclass
class McgRound:
    word: Word
    K: int
    f: PartialInjection
    condition: ProductCondition
    checks: Trace = field(default_factory=Trace)
    agreements: list[tuple[int, int]] = field(default_factory=list)


@dataclass
class McgTrace:
    rounds: list[McgRound] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.checks.ok for r in self.rounds)

    def lines(self) -> list[str]:
        out = []
        for n, r in enumerate(self.rounds):
            out.append(f"round n={n} word={str(r.word).replace(' ', '.')} K={r.K} f={str(r.f).replace(' ', '')}")
            out.extend(r.checks.lines())
        out.append("mcg verdict=" + ("pass" if self.ok else "fail"))
        return out


def _degree_one(rho: Representation, w: Word) -> Optional[tuple[Word, int]]:
    """``(u, ±1)`` when ``w = u x^±1`` with ``u`` empty or an A-block."""
    dec = _decompose(rho, w)
    if dec.is_pure_power():
        return (Word(()), dec.power) if abs(dec.power) == 1 else None
    if len(dec.blocks) == 1 and abs(dec.blocks[0][1]) == 1:
        return dec.blocks[0]
    return None


def _fix_statement(rho: Representation, u: Word, e: int, L: int, K: int):
    """``fix(rho[g](u x^e)) ⊆ K`` read inside the first ``L`` outputs of ``g``.

    For ``e = 1`` the fixpoints are the ``l`` with ``g(l) = rho(u)^-1(l)``; for
    ``e = -1`` they are the values ``rho(u)(j)`` with ``g(j) = rho(u)(j)``.
    """
    pu = word_perm(rho, u)
    j = F.Var("l")
    agree = F.Cmp("=", F.CodeOut(0, j), F.Param(0, j))
    if e == 1:
        body = F.Or(F.Not(agree), F.Cmp("<", j, F.Num(K)))
        return F.Quant("forall", "l", F.Num(L), body), [pu.inverse()]
    body = F.Or(F.Not(agree), F.Cmp("<", F.Param(0, j), F.Num(K)))
    return F.Quant("forall", "l", F.Num(L), body), [pu]


def _fix_bound_for_g(rho: Representation, p: ProductCondition, g: C.Code, u: Word, e: int, checks: Trace) -> int:
    pu = word_perm(rho, u)
    target = pu.inverse() if e == 1 else pu
    L = min(len(C.eval_star(g, m)) for m in C.branch_matrices(p, g.depth))
    K = 0
    for m in C.branch_matrices(p, g.depth):
        out = C.eval_star(g, m)
        for l in range(L):
            if out[l] == target(l):
                K = max(K, (l if e == 1 else target(l)) + 1)
    phi, params = _fix_statement(rho, u, e, L, K)
    exact = forces(p, [g], params, phi).kind == "ForcedTrue"
    least = K == 0 or forces(p, [g], params, _fix_statement(rho, u, e, L, K - 1)[0]).kind != "ForcedTrue"
    checks.add("mcg.2", exact and least, K=K, window=L)
    return K


def _premise_injective(cell: ProductCondition, g: C.Code) -> None:
    mats = C.branch_matrices(cell, g.depth)
    seen: dict[tuple[int, ...], C.Matrix] = {}
    for m in mats:
        out = C.eval_star(g, m)
        if len(set(out)) != len(out):
            raise PremiseFailure(f"g repeats a value on the branch {list(m)}")
        if out in seen:
            raise PremiseFailure(f"g gives the same output on the branches {list(seen[out])} and {list(m)}")
        seen[out] = m


def _agreement_point(cell: ProductCondition, g: C.Code, M: int) -> tuple[ProductCondition, int, int]:
    """A box below ``cell`` deciding ``g`` on ``M..2M`` and a decided ``g(l) = v`` with ``l, v >= M``."""
    _premise_injective(cell, g)
    mats = C.branch_matrices(cell, g.depth)
    outs = {m: C.eval_star(g, m) for m in mats}
    if any(len(o) <= 2 * M for o in outs.values()):
        raise BudgetExceeded(f"g is decided only below {min(len(o) for o in outs.values())}, need index {2 * M}")
    for d in range(g.depth + 1):
        groups: dict[C.Matrix, list[C.Matrix]] = {}
        for m in mats:
            groups.setdefault(C.square(m, d), []).append(m)
        for key, members in groups.items():
            window = {outs[m][M:2 * M + 1] for m in members}
            if len(window) == 1:
                values = window.pop()
                for offset, v in enumerate(values):
                    if v >= M:
                        return P.restrict_box(cell, key), M + offset, v
                raise PremiseFailure(f"g maps all of {M}..{2 * M} below {M}")
    raise BudgetExceeded(f"no box of depth <= {g.depth} decides g on {M}..{2 * M}")


def mcg_eliminate(rho: Representation, p: ProductCondition, g: C.Code, rounds: int, bound: int = VERIFY_BOUND) -> McgTrace:
    """Run ``rounds`` rounds; each extends ``f`` and refines ``p`` as the fusion argument does.

    Raises :class:`BudgetExceeded` when the code depth cannot decide the values
    a round needs; the trace built so far is attached as ``exc.trace``.
    """
    if not C.validate_code(g).ok:
        raise InvalidCode("g fails validation")
    trace = McgTrace()
    words = nice_words(rho, rounds)
    f = PartialInjection()
    cur = p
    Ks: list[int] = []
    try:
        for n in range(rounds):
            w = words[n]
            checks = Trace()
            prev = f
            one = _degree_one(rho, w)
            K = _fix_bound_for_g(rho, cur, g, *one, checks) if one else 0
            if n not in f.dom():
                cert = extend_domain(rho, f, words[:n], n, bound)
                checks.extend([cert.check()])
                f = cert.t
            if n not in f.ran():
                cert = extend_range(rho, f, words[:n], n, bound)
                checks.extend([cert.check()])
                f = cert.t
            h = [f]
            agreements: list[tuple[int, int]] = []
            cells: list[P.SuitableFunction] = []

            def choose(cell: ProductCondition, sigma: P.SuitableFunction) -> ProductCondition:
                M = bound_M(rho, h[0], words[:n], n)
                M = max([M] + Ks[:n])
                r, l, v = _agreement_point(cell, g, M)
                h[0] = h[0].extend(l, v)
                agreements.append((l, v))
                cells.append(sigma)
                return r

            nxt = P.amalgamate_dense(cur, P.standard_F(n), n, choose)
            f = h[0]
            K = max(K, 1 + max(exact_fixpoints(rho, f, w), default=-1))
            Ks.append(K)
            checks.add("mcg.1", n in f.dom() and n in f.ran(), n=n)
            checks.add("mcg.fusion", P.leq_n(nxt, cur, n), n=n)
            checks.add("mcg.increasing", prev.issubset(f) and len(f) > len(prev), size=len(f))
            for m in range(n + 1):
                fx = sorted(exact_fixpoints(rho, f, words[m]))
                checks.add("mcg.3", all(k < Ks[m] for k in fx), m=m, word=str(words[m]), fix=fx, K=Ks[m])
            for sigma, (l, v) in zip(cells, agreements):
                verdict = C.decide_value(P.restrict_suitable(nxt, sigma), g, l)
                checks.add("mcg.4", verdict == C.Forced(v) and l not in prev.dom(), cell=str(sigma), l=l, value=v)
            claim = F.disj(*[F.Cmp("=", F.CodeOut(0, F.Num(l)), F.Num(v)) for l, v in agreements])
            checks.add("mcg.4.forced", forces(nxt, [g], [], claim).kind == "ForcedTrue", points=len(agreements))
            trace.rounds.append(McgRound(w, K, f, nxt, checks, agreements))
            cur = nxt
    except BudgetExceeded as exc:
        exc.trace = trace
        raise
    return trace
