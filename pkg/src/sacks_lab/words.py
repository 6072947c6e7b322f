"""Words over an alphabet ``A`` plus the distinguished letter ``x``.

Words act on the naturals through a :class:`Representation`, letters being
applied right to left.  Nice words, rotations that make a word nice, and the
audit of a cofinitary representation over all short words live here too.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional, Sequence, Union

from .errors import MissingX
from .perms import EAPermutation, PartialInjection
from .report import FusionReport

X = "x"
Letter = tuple[str, int]
XValue = Union[PartialInjection, EAPermutation]


@dataclass(frozen=True)
class Word:
    letters: tuple[Letter, ...] = ()

    def __post_init__(self):
        for g, e in self.letters:
            if e not in (1, -1) or not g:
                raise ValueError(f"bad letter {(g, e)}")

    @classmethod
    def parse(cls, text: str) -> "Word":
        """Read ``"a x^-1 b^2"``: space-separated generators with optional integer powers."""
        letters: list[Letter] = []
        for pos, tok in _tokens(text):
            m = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_]*)(?:\^(-?\d+))?", tok)
            if not m:
                raise ValueError(f"at position {pos}: cannot read letter {tok!r}")
            k = int(m.group(2)) if m.group(2) is not None else 1
            if k == 0:
                raise ValueError(f"at position {pos}: zero exponent")
            letters += [(m.group(1), 1 if k > 0 else -1)] * abs(k)
        return cls(tuple(letters))

    def __str__(self) -> str:
        if not self.letters:
            return "ε"
        parts = []
        for (g, e), grp in itertools.groupby(self.letters):
            k = e * len(list(grp))
            parts.append(g if k == 1 else f"{g}^{k}")
        return " ".join(parts)

    def __len__(self) -> int:
        return len(self.letters)

    def __add__(self, other: "Word") -> "Word":
        """Concatenation without reduction."""
        return Word(self.letters + other.letters)

    def __mul__(self, other: "Word") -> "Word":
        """Group product: concatenate and reduce."""
        return reduce(self + other)

    def inverse(self) -> "Word":
        return Word(tuple((g, -e) for g, e in reversed(self.letters)))

    def generators(self) -> set[str]:
        return {g for g, _ in self.letters}

    def has_x(self) -> bool:
        return any(g == X for g, _ in self.letters)

    def x_degree(self) -> int:
        return sum(1 for g, _ in self.letters if g == X)

    def is_reduced(self) -> bool:
        return all(a[0] != b[0] or a[1] != -b[1] for a, b in zip(self.letters, self.letters[1:]))


def _tokens(text: str) -> Iterator[tuple[int, str]]:
    for m in re.finditer(r"\S+", text):
        yield m.start(), m.group()


EMPTY = Word()


def word(text: str) -> Word:
    return Word.parse(text)


def reduce(w: Word) -> Word:
    stack: list[Letter] = []
    for g, e in w.letters:
        if stack and stack[-1] == (g, -e):
            stack.pop()
        else:
            stack.append((g, e))
    return Word(tuple(stack))


def perp(w: Word) -> Word:
    """Swap ``x`` and ``x^-1``, leaving other letters alone."""
    return Word(tuple((g, -e if g == X else e) for g, e in w.letters))


@dataclass(frozen=True)
class Representation:
    """Permutations for the letters of ``A`` and an optional value for ``x``."""

    perms: tuple[tuple[str, EAPermutation], ...]
    x_value: Optional[XValue] = None
    _inverses: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    @classmethod
    def make(cls, perms: Mapping[str, EAPermutation], x_value: Optional[XValue] = None) -> "Representation":
        if X in perms:
            raise ValueError("x is reserved for the adjoined element")
        return cls(tuple(sorted(perms.items())), x_value)

    def with_x(self, x_value: Optional[XValue]) -> "Representation":
        return Representation(self.perms, x_value)

    @property
    def alphabet(self) -> tuple[str, ...]:
        return tuple(g for g, _ in self.perms)

    def perm(self, g: str) -> EAPermutation:
        for a, p in self.perms:
            if a == g:
                return p
        raise KeyError(f"no permutation for generator {g!r}")

    def inverse_perm(self, g: str) -> EAPermutation:
        if g not in self._inverses:
            self._inverses[g] = self.perm(g).inverse()
        return self._inverses[g]

    def total(self) -> bool:
        return self.x_value is None or isinstance(self.x_value, EAPermutation)


def _apply(rho: Representation, letter: Letter, n: int) -> Optional[int]:
    g, e = letter
    if g == X:
        xv = rho.x_value
        if xv is None:
            raise MissingX("word mentions x but no value for x is set")
        if isinstance(xv, PartialInjection):
            return xv(n) if e == 1 else xv.apply_inverse(n)
        if e == 1:
            return xv(n)
        if "x" not in rho._inverses or rho._inverses["x"][0] is not xv:
            rho._inverses["x"] = (xv, xv.inverse())
        return rho._inverses["x"][1](n)
    return rho.perm(g)(n) if e == 1 else rho.inverse_perm(g)(n)


def evaluate(rho: Representation, w: Word, n: int) -> Optional[int]:
    """``rho(w)(n)``, or ``None`` when a partial ``x`` is undefined along the way."""
    if w.has_x() and rho.x_value is None:
        raise MissingX("word mentions x but no value for x is set")
    cur: Optional[int] = n
    for letter in reversed(w.letters):
        cur = _apply(rho, letter, cur)
        if cur is None:
            return None
    return cur


def word_perm(rho: Representation, w: Word) -> EAPermutation:
    """The permutation a word evaluates to under a total representation."""
    if w.has_x() and not isinstance(rho.x_value, EAPermutation):
        raise MissingX("word needs a total value for x")
    out = EAPermutation.identity()
    for g, e in w.letters:
        if g == X:
            p = rho.x_value if e == 1 else rho.x_value.inverse()
        else:
            p = rho.perm(g) if e == 1 else rho.inverse_perm(g)
        out = out.compose(p)
    return out


@dataclass(frozen=True)
class FixReport:
    points: frozenset[int]
    tail: str  # finite, cofinal, cofinal everywhere, unknown-partial
    classes: tuple[int, ...] = ()
    period: int = 1

    def describe(self) -> str:
        if self.tail == "cofinal":
            return f"cofinal in residue classes {{{', '.join(map(str, self.classes))}}} mod {self.period}"
        return self.tail


def fix_report(rho: Representation, w: Word, bound: int) -> FixReport:
    """Fixpoints below ``bound`` and whether there are cofinally many."""
    if not rho.total() and w.has_x():
        pts = frozenset(n for n in range(bound) if evaluate(rho, w, n) == n)
        return FixReport(pts, "unknown-partial")
    p = word_perm(rho, w)
    pts = p.fix_below(bound)
    classes = p.fixed_classes()
    if not classes:
        return FixReport(pts, "finite")
    if len(classes) == p.period:
        return FixReport(pts, "cofinal everywhere", classes, p.period)
    return FixReport(pts, "cofinal", classes, p.period)


def conjugation_check(rho: Representation, u: Word, v: Word, bound: int) -> bool:
    """``n -> rho(v)(n)`` carries the fixpoints of ``uv`` onto those of ``vu``.

    Checked pointwise below ``bound``; when both fixpoint sets are finite the
    full counts are compared as well.
    """
    uv, vu = u * v, v * u
    pv, puv, pvu = word_perm(rho, v), word_perm(rho, uv), word_perm(rho, vu)
    for n in range(bound):
        if (puv(n) == n) != (pvu(pv(n)) == pv(n)):
            return False
    finite = (puv.has_finite_fix(), pvu.has_finite_fix())
    if finite == (True, True):
        return len(puv.fixpoints()) == len(pvu.fixpoints()) and {pv(n) for n in puv.fixpoints()} == pvu.fixpoints()
    return finite == (False, False)


@dataclass(frozen=True)
class NiceDecomposition:
    """Either ``x^power`` or blocks ``(u_i, k_i)`` read left to right."""

    power: int = 0
    blocks: tuple[tuple[Word, int], ...] = ()

    @property
    def degree(self) -> int:
        return abs(self.power) if not self.blocks else sum(abs(k) for _, k in self.blocks)

    def is_pure_power(self) -> bool:
        return not self.blocks

    def a_blocks(self) -> tuple[Word, ...]:
        return tuple(u for u, _ in self.blocks)

    def __str__(self) -> str:
        if self.is_pure_power():
            return f"pure power x^{self.power}"
        return "blocks " + ", ".join(f"({u}, {k})" for u, k in self.blocks)


def _runs(w: Word) -> list[tuple[bool, tuple[Letter, ...]]]:
    """Maximal runs of x-letters and of A-letters, in order."""
    return [(is_x, tuple(grp)) for is_x, grp in itertools.groupby(w.letters, key=lambda l: l[0] == X)]


def is_nice(rho: Representation, w: Word) -> Optional[NiceDecomposition]:
    if not w.letters or not w.is_reduced():
        return None
    runs = _runs(w)
    if len(runs) == 1 and runs[0][0]:
        exps = {e for _, e in runs[0][1]}
        return NiceDecomposition(power=len(runs[0][1]) * exps.pop()) if len(exps) == 1 else None
    if runs[0][0] or not runs[-1][0]:
        return None
    blocks = []
    for (_, a_run), (_, x_run) in zip(runs[0::2], runs[1::2]):
        exps = {e for _, e in x_run}
        if len(exps) != 1:
            return None
        u = Word(a_run)
        if word_perm(rho, u).is_identity():
            return None
        blocks.append((u, len(x_run) * exps.pop()))
    return NiceDecomposition(blocks=tuple(blocks))


def normalize(rho: Representation, w: Word) -> Word:
    """Reduce, and delete every maximal A-run that evaluates to the identity."""
    w = reduce(w)
    while True:
        kept: list[Letter] = []
        changed = False
        for is_x, run in _runs(w):
            if not is_x and word_perm(rho, Word(run)).is_identity():
                changed = True
                continue
            kept.extend(run)
        if not changed:
            return w
        w = reduce(Word(tuple(kept)))


@dataclass(frozen=True)
class Split:
    u: Word
    v: Word
    rotated: Word
    kind: str  # in_WA or nice

    def __str__(self) -> str:
        return f"split: ({self.u or 'ε'} | {self.v or 'ε'}); rotated: {self.rotated}; class: {self.kind}"


def _trailing_a(w: Word) -> int:
    n = 0
    for g, _ in reversed(w.letters):
        if g == X:
            break
        n += 1
    return n


def split_to_nice(rho: Representation, w: Word) -> Split:
    """Cut ``w = u v`` so that ``v u`` normalizes to an A-word or a nice word.

    Among all cuts the preferred result is an A-word, then the shortest
    rotated word, then the shortest trailing A-part, then the leftmost cut.
    """
    best = None
    for i in range(len(w) + 1):
        u, v = Word(w.letters[:i]), Word(w.letters[i:])
        rot = normalize(rho, v + u)
        if not rot.has_x():
            kind = "in_WA"
        elif is_nice(rho, rot) is not None:
            kind = "nice"
        else:
            continue
        key = (kind != "in_WA", len(rot), _trailing_a(rot), i)
        if best is None or key < best[0]:
            best = (key, Split(u, v, rot, kind))
    if best is None:
        raise ValueError(f"no rotation of {w} normalizes to an A-word or a nice word")
    return best[1]


def reduced_words(alphabet: Sequence[str], max_len: int) -> Iterator[Word]:
    """All reduced words up to ``max_len``, by length then letter order.

    Letter order is ``g`` before ``g^-1``, generators in the given order.
    """
    letters = [(g, e) for g in alphabet for e in (1, -1)]
    frontier = [EMPTY]
    yield EMPTY
    for _ in range(max_len):
        nxt = []
        for w in frontier:
            for l in letters:
                if w.letters and w.letters[-1] == (l[0], -l[1]):
                    continue
                nw = Word(w.letters + (l,))
                nxt.append(nw)
                yield nw
        frontier = nxt


def cofinitary_audit(rho: Representation, x_value: EAPermutation, max_len: int, bound: int) -> FusionReport:
    """Check every short word is the identity or has finitely many fixpoints.

    Each word is also compared with its nice rotation through the conjugation
    bijection.  Words that evaluate to the identity are exempt and noted.
    """
    rho = rho.with_x(x_value)
    report = FusionReport()
    for idx, w in enumerate(reduced_words(rho.alphabet + (X,), max_len)):
        p = word_perm(rho, w)
        if p.is_identity():
            if w.letters:
                report.notes.append(f"exempt identity word {w}")
            continue
        if not p.has_finite_fix():
            fr = fix_report(rho, w, bound)
            report.fail(idx, "cofinitary", f"{w}: {fr.describe()}")
        sp = split_to_nice(rho, w)
        if not conjugation_check(rho, sp.u, sp.v, bound):
            report.fail(idx, "conjugation", f"{w} vs rotation {sp.v + sp.u}")
        rot = word_perm(rho, sp.rotated)
        vu = word_perm(rho, sp.v * sp.u)
        if rot != vu:
            report.fail(idx, "rotation", f"{sp.rotated} differs from {sp.v + sp.u}")
    return report
