"""Command-line front end: ``sacks-lab <subcommand> ...``.

Exit status: 0 when the verdict passes, 1 when it fails, 2 on usage or
input errors, 3 when a construction runs out of code depth or rounds.
Every output mode is deterministic; there are no timestamps.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

from . import codes as C
from . import fixtures
from . import products as P
from . import trees as T
from .cofinitary import extend_domain, extend_range, mcg_eliminate
from .errors import BudgetExceeded, PremiseFailure, SacksLabError
from .families import (
    CodedSet,
    FamilyInstance,
    ad_eliminate,
    builtin_type,
    ed_eliminate,
    is_intruder,
    is_of_type,
    load_family,
)
from .families.registry import decode_value
from .formulas import equivalence_check, forces, format_formula, parse_formula, refine_to_decide
from .formulas.semantics import EPReal
from .generators import forcing_instance, random_word
from .perms import EAPermutation, PartialInjection
from .products import ProductCondition
from .words import Representation, cofinitary_audit, fix_report, is_nice, normalize, reduce, split_to_nice, word

DEFAULT_SEED = 20240601


class InputError(Exception):
    """Malformed user input; reported with exit status 2."""


@dataclass
class Result:
    passed: bool
    lines: list[str] = field(default_factory=list)
    data: dict = field(default_factory=dict)


# --- input helpers --------------------------------------------------------


def _load_json(arg: str) -> Any:
    """Parse ``arg`` as inline JSON, or read it from the file it names."""
    text = arg
    if os.path.exists(arg):
        with open(arg, encoding="utf-8") as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{arg}: invalid JSON at position {exc.pos}: {exc.msg}") from None


def parse_leaf_list(text: str) -> T.TreeCondition:
    """Leaves as a JSON list or as comma-separated nodes; ``""`` is the full tree."""
    stripped = text.strip()
    if stripped.startswith("["):
        try:
            leaves = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise InputError(f"malformed leaf list at position {exc.pos}: {exc.msg}") from None
        if not isinstance(leaves, list) or not all(isinstance(s, str) for s in leaves):
            raise InputError("malformed leaf list at position 0: expected a list of strings")
        offsets = []
        pos = 0
        for s in leaves:
            pos = text.find(json.dumps(s), pos)
            offsets.append(pos + 1)
    else:
        leaves, offsets, pos = [], [], 0
        parts = text.split(",")
        for part in parts:
            lead = len(part) - len(part.lstrip())
            if len(parts) > 1 and not part.strip():
                raise InputError(f"malformed leaf list at position {pos}: empty node in a comma list")
            leaves.append(part.strip())
            offsets.append(pos + lead)
            pos += len(part) + 1
    for s, off in zip(leaves, offsets):
        for i, ch in enumerate(s):
            if ch not in "01":
                raise InputError(f"malformed leaf list at position {off + i}: expected 0 or 1, found {ch!r}")
    if not leaves:
        raise InputError("malformed leaf list at position 0: expected at least one leaf")
    return T.TreeCondition.from_leaves(leaves)


def _condition(arg: Optional[str]) -> ProductCondition:
    if arg is None:
        return ProductCondition.full()
    try:
        return ProductCondition.from_json(_load_json(arg))
    except (TypeError, ValueError, AttributeError) as exc:
        raise InputError(f"cannot read condition {arg}: {exc}") from None


def _code(arg: str) -> C.Code:
    named = {"mcg": fixtures.mcg_fixture, "ed": fixtures.ed_fixture, "set": fixtures.set_fixture, "constant": fixtures.constant_fixture}
    if arg.startswith("fixture:"):
        name = arg.split(":", 1)[1]
        if name not in named:
            raise InputError(f"unknown fixture {name!r}; choose from {', '.join(named)}")
        return named[name]()
    return C.Code.from_json(_load_json(arg))


def _perm_arg(arg: str) -> EAPermutation:
    return _perm(arg if arg in ("pair-swap", "identity") else _load_json(arg))


def _perm(data: Any) -> EAPermutation:
    if data == "pair-swap":
        return EAPermutation.pair_swap()
    if data == "identity":
        return EAPermutation.identity()
    return EAPermutation.from_json(data)


def _representation(arg: Optional[str], letters: Sequence[str] = ("a",)) -> Representation:
    """A permutation file ``{letter: perm}``; by default every letter is the pair swap."""
    if arg is None:
        return Representation.make({g: EAPermutation.pair_swap() for g in letters})
    data = _load_json(arg)
    if not isinstance(data, dict):
        raise InputError("a representation is a JSON object from letters to permutations")
    return Representation.make({g: _perm(v) for g, v in data.items()})


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"expected comma-separated naturals, got {text!r}") from None


def _letters(words) -> list[str]:
    return sorted({g for w in words for g, _ in w.letters if g != "x"}) or ["a"]


# --- subcommands ----------------------------------------------------------


def cmd_tree(args) -> Result:
    t = parse_leaf_list(args.leaves)
    lines = [f"tree: {t}"]
    data: dict = {"leaves": t.to_json()}
    passed = True
    for n in range(args.levels + 1):
        level = T.split_level(t, n)
        lines.append(f"split level {n}: {' '.join(s or 'ε' for s in level)}")
        data.setdefault("split_levels", []).append(list(level))
    if args.restrict is not None:
        r = T.restrict_node(t, args.restrict)
        lines.append(f"restricted to {args.restrict or 'ε'}: {r}")
        data["restricted"] = r.to_json()
    if args.leq is not None:
        other = parse_leaf_list(args.leq)
        passed = T.leq(t, other, args.n)
        rel = "≤" if args.n is None else f"≤_{args.n}"
        lines.append(f"{t} {rel} {other}: {str(passed).lower()}")
        data["leq"] = passed
    return Result(passed, lines, data)


def cmd_suitable(args) -> Result:
    p = _condition(args.condition)
    F = _ints(args.F) if args.F is not None else sorted(P.standard_F(args.n))
    sigmas = P.suitable_functions(p, F, args.n)
    ok = P.check_antichain(p, F, args.n)
    lines = [f"suitable functions for F={F}, n={args.n}: {len(sigmas)}"]
    lines += [f"  {s}" for s in sigmas] if args.list else []
    lines.append(f"cells form a maximal antichain below p: {str(ok).lower()}")
    return Result(ok, lines, {"count": len(sigmas), "suitable": [str(s) for s in sigmas], "antichain": ok})


def cmd_decide(args) -> Result:
    if args.random:
        rng = random.Random(args.seed)
        p, codes, params, phi = forcing_instance(rng)
        ok = equivalence_check(p, codes, params, phi, args.rounds)
        lines = [f"seed {args.seed}", f"condition: {p}", f"formula: {format_formula(phi)}", f"equivalence: {str(ok).lower()}"]
        return Result(ok, lines, {"formula": format_formula(phi), "condition": p.to_json(), "equivalence": ok})
    if not args.code:
        raise InputError("decide needs at least one --code")
    p = _condition(args.condition)
    codes = [_code(c) for c in args.code]
    if args.index is not None:
        verdict = C.decide_value(p, codes[0], args.index)
        return Result(isinstance(verdict, C.Forced), [str(verdict)], {"verdict": str(verdict)})
    if args.formula is None:
        raise InputError("decide needs --formula or --index")
    phi = parse_formula(args.formula)
    params = [EPReal.from_json(_load_json(a)) for a in args.param]
    if args.mode_decide == "forces":
        v = forces(p, codes, params, phi)
        if v.kind == "BudgetExceeded":
            raise BudgetExceeded(v.reason)
        lines = [v.kind]
        if v.kind == "Neither":
            lines += [f"true below: {v.q_true}", f"false below: {v.q_false}"]
        return Result(v.kind == "ForcedTrue", lines, v.to_json())
    if args.mode_decide == "refine":
        r, value = refine_to_decide(p, codes, params, phi, args.rounds)
        return Result(value, [f"{'true' if value else 'false'} below {r}"], {"value": value, "condition": r.to_json()})
    ok = equivalence_check(p, codes, params, phi, args.rounds)
    return Result(ok, [f"equivalence: {str(ok).lower()}"], {"equivalence": ok})


def cmd_word(args) -> Result:
    if args.random is not None:
        rng = random.Random(args.seed)
        w = random_word(rng, ("a", "x"), args.random, 1)
    elif args.word is None and args.op == "audit":
        w = word("")
    elif args.word is None:
        raise InputError("word needs a WORD or --random LENGTH")
    else:
        try:
            w = word(args.word)
        except ValueError as exc:
            raise InputError(str(exc)) from None
    rho = _representation(args.rho, _letters([w]))
    x = _perm_arg(args.x) if args.x else None
    op = args.op
    if op == "reduce":
        r = reduce(w) if args.rho is None else normalize(rho, w)
        return Result(True, [str(r)], {"word": str(r)})
    if op == "nice":
        dec = is_nice(rho, reduce(w))
        text = f"{reduce(w)}: " + (str(dec) if dec else "not nice")
        return Result(dec is not None, [text], {"word": str(reduce(w)), "nice": dec is not None, "decomposition": str(dec) if dec else None})
    if op == "split":
        sp = split_to_nice(rho, w)
        return Result(True, [str(sp)], {"u": str(sp.u), "v": str(sp.v), "rotated": str(sp.rotated), "class": sp.kind})
    if op == "fix":
        if w.has_x() and x is None:
            raise InputError("word mentions x; pass --x with a permutation")
        fr = fix_report(rho.with_x(x), w, args.bound)
        return Result(fr.tail == "finite", [f"fixpoints below {args.bound}: {sorted(fr.points)}", f"tail: {fr.describe()}"],
                      {"points": sorted(fr.points), "tail": fr.tail})
    if x is None:
        raise InputError("audit needs --x with a permutation")
    report = cofinitary_audit(rho, x, args.max_len, args.bound)
    return Result(report.ok, report.lines(), {"ok": report.ok, "failures": [list(f) for f in report.failures]})


def cmd_extend(args) -> Result:
    words = [word(w) for w in args.words]
    rho = _representation(args.rho, _letters(words))
    try:
        s = PartialInjection.from_json(_load_json(args.injection)) if args.injection else PartialInjection()
    except ValueError as exc:
        raise InputError(str(exc)) from None
    cert = (extend_domain if args.side == "domain" else extend_range)(rho, s, words, args.point, args.bound)
    c = cert.check()
    return Result(True, [c.line()], cert.to_json())


def cmd_eliminate(args) -> Result:
    p = _condition(args.condition)
    if args.engine == "mcg":
        rho = _representation(args.rho)
        g = _code(args.code or "fixture:mcg")
        trace = mcg_eliminate(rho, p, g, args.rounds)
        return Result(trace.ok, trace.lines(), {"ok": trace.ok, "lines": trace.lines()})
    if args.family:
        t, F = load_family(_load_json(args.family))
    elif args.engine == "ed":
        F = FamilyInstance((EPReal.constant(7),))
    else:
        F = FamilyInstance((CodedSet.residue_class(0, 2),))
    if args.engine == "ed":
        trace = ed_eliminate(F, p, _code(args.code or "fixture:ed"), args.rounds)
    else:
        trace = ad_eliminate(F, p, _code(args.code or "fixture:set"), args.rounds, args.branch)
    return Result(trace.ok, trace.lines(), {"ok": trace.ok, "lines": trace.lines()})


def cmd_type(args) -> Result:
    t, F = load_family(_load_json(args.family))
    of_type = is_of_type(t, F)
    lines = [f"{t.name} family of {len(F)} members: of type {str(of_type).lower()}"]
    data: dict = {"type": t.name, "of_type": of_type}
    if args.candidate is None:
        return Result(of_type, lines, data)
    g = decode_value(t.intruder_backend, _load_json(args.candidate))
    intruder = is_intruder(t, g, F)
    lines.append(f"candidate is an intruder: {str(intruder).lower()}")
    data["intruder"] = intruder
    return Result(intruder, lines, data)


# --- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=("human", "log", "json"), default="human", help="output format")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for randomized commands")

    parser = argparse.ArgumentParser(prog="sacks-lab", description="Finite-stage Sacks forcing toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("tree", parents=[common], help="split levels, restriction and ordering of one tree")
    sp.add_argument("leaves", help='leaf list, e.g. "00,01,1" or \'["0","1"]\'')
    sp.add_argument("--levels", type=int, default=2, help="print split levels 0..LEVELS")
    sp.add_argument("--restrict", metavar="NODE")
    sp.add_argument("--leq", metavar="LEAVES", help="compare with another tree")
    sp.add_argument("--n", type=int, help="use the fusion order <=_n for --leq")
    sp.set_defaults(func=cmd_tree)

    sp = sub.add_parser("suitable", parents=[common], help="enumerate suitable functions and verify the antichain")
    sp.add_argument("--condition", help="product condition JSON or file (default: all full)")
    sp.add_argument("--F", help="coordinates, comma-separated (default 0..n-1)")
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--list", action="store_true")
    sp.set_defaults(func=cmd_suitable)

    sp = sub.add_parser("decide", parents=[common], help="decide a code value or a formula below a condition")
    sp.add_argument("--condition")
    sp.add_argument("--code", action="append", default=[], help="code JSON/file, or fixture:NAME")
    sp.add_argument("--param", action="append", default=[], help="eventually periodic real {prefix, period}")
    sp.add_argument("--formula")
    sp.add_argument("--index", type=int, help="decide the value of the first code at this index")
    sp.add_argument("--how", dest="mode_decide", choices=("forces", "refine", "equivalence"), default="forces")
    sp.add_argument("--rounds", type=int, default=3)
    sp.add_argument("--random", action="store_true", help="check a seeded random instance instead")
    sp.set_defaults(func=cmd_decide)

    sp = sub.add_parser("word", parents=[common], help="free-group words under a representation")
    sp.add_argument("op", choices=("reduce", "nice", "split", "fix", "audit"))
    sp.add_argument("word", nargs="?")
    sp.add_argument("--rho", help="JSON {letter: permutation}; default: every letter is the pair swap")
    sp.add_argument("--x", help="permutation for x: JSON, a file, pair-swap or identity")
    sp.add_argument("--bound", type=int, default=64)
    sp.add_argument("--max-len", type=int, default=3)
    sp.add_argument("--random", type=int, metavar="LENGTH", help="use a seeded random word over a, x")
    sp.set_defaults(func=cmd_word)

    sp = sub.add_parser("extend", parents=[common], help="domain or range extension certificates")
    sp.add_argument("side", choices=("domain", "range"))
    sp.add_argument("--point", type=int, required=True, help="n for domain, m for range")
    sp.add_argument("--words", action="append", default=[], help="a nice word to preserve (repeatable)")
    sp.add_argument("--injection", help='partial injection JSON, e.g. {"0": 1}')
    sp.add_argument("--rho")
    sp.add_argument("--bound", type=int, default=256)
    sp.set_defaults(func=cmd_extend)

    sp = sub.add_parser("eliminate", parents=[common], help="run an elimination engine")
    sp.add_argument("engine", choices=("ed", "ad", "mcg"))
    sp.add_argument("--rounds", type=int, default=1)
    sp.add_argument("--condition")
    sp.add_argument("--code", help="code JSON/file or fixture:NAME (default: the engine's fixture)")
    sp.add_argument("--family", help="family file {type, members}")
    sp.add_argument("--rho")
    sp.add_argument("--branch", choices=("finite", "infinite"), default="finite")
    sp.set_defaults(func=cmd_eliminate)

    sp = sub.add_parser("type", parents=[common], help="family membership and intruder checks")
    sp.add_argument("--family", required=True)
    sp.add_argument("--candidate", help="backend value to test as an intruder")
    sp.set_defaults(func=cmd_type)
    return parser


def _emit(res: Result, mode: str, out) -> None:
    if mode == "json":
        payload = {"passed": res.passed, **res.data}
        out.write(json.dumps(payload, sort_keys=True, indent=2, default=str) + "\n")
    elif mode == "log":
        for line in res.lines:
            out.write(line + "\n")
        out.write("verdict=" + ("pass" if res.passed else "fail") + "\n")
    else:
        for line in res.lines:
            out.write(line + "\n")


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        res = args.func(args)
    except BudgetExceeded as exc:
        err.write(f"budget exceeded: {exc}\n")
        trace = getattr(exc, "trace", None)
        if trace is not None and args.mode != "json":
            for line in trace.lines():
                out.write(line + "\n")
        return 3
    except PremiseFailure as exc:
        _emit(Result(False, [f"premise failure: {exc}"], {"premise_failure": str(exc)}), args.mode, out)
        return 1
    except (InputError, SacksLabError, ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        err.write(f"sacks-lab {args.command}: error: {msg}\n")
        return 2
    _emit(res, args.mode, out)
    return 0 if res.passed else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
