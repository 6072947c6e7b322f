"""Decidable parameter reals and the evaluator for closed formulas."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Sequence

from ..errors import FreeVariable, IndexBeyondOutput
from .ast import Add, And, CodeOut, Cmp, Formula, Not, Num, Or, Param, Quant, Term, Var

Real = Callable[[int], int]


@dataclass(frozen=True)
class EPReal:
    """An eventually periodic sequence of naturals, kept in canonical form.

    The period is primitive and the prefix is as short as possible, so two
    values are equal as functions exactly when they compare equal.
    """

    prefix: tuple[int, ...] = ()
    period: tuple[int, ...] = (0,)

    def __post_init__(self):
        prefix, period = tuple(self.prefix), tuple(self.period)
        if not period:
            raise ValueError("period must be nonempty")
        if any(v < 0 for v in prefix + period):
            raise ValueError("values must be naturals")
        d = len(period)
        for k in range(1, d + 1):
            if d % k == 0 and period == period[:k] * (d // k):
                period = period[:k]
                break
        while prefix and prefix[-1] == period[-1]:
            prefix, period = prefix[:-1], (period[-1],) + period[:-1]
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "period", period)

    @classmethod
    def constant(cls, value: int) -> "EPReal":
        return cls((), (value,))

    def __call__(self, n: int) -> int:
        if n < len(self.prefix):
            return self.prefix[n]
        return self.period[(n - len(self.prefix)) % len(self.period)]

    def values(self, n: int) -> list[int]:
        return [self(i) for i in range(n)]

    @property
    def threshold(self) -> int:
        return len(self.prefix)

    def to_json(self) -> dict:
        return {"prefix": list(self.prefix), "period": list(self.period)}

    @classmethod
    def from_json(cls, data: Mapping) -> "EPReal":
        return cls(tuple(data.get("prefix", ())), tuple(data["period"]))

    def __str__(self) -> str:
        return f"{list(self.prefix)}({','.join(map(str, self.period))})*"


def eval_term(t: Term, outs: Sequence[Sequence[int]], params: Sequence[Real], env: Mapping[str, int]) -> int:
    if isinstance(t, Num):
        return t.value
    if isinstance(t, Var):
        if t.name not in env:
            raise FreeVariable(f"variable {t.name!r} is not bound")
        return env[t.name]
    if isinstance(t, Add):
        return eval_term(t.base, outs, params, env) + t.offset
    k = eval_term(t.arg, outs, params, env)
    if isinstance(t, CodeOut):
        if t.index >= len(outs):
            raise IndexBeyondOutput(f"no code v{t.index}")
        if k >= len(outs[t.index]):
            raise IndexBeyondOutput(f"v{t.index}({k}) is beyond the decided output length {len(outs[t.index])}")
        return outs[t.index][k]
    if t.index >= len(params):
        raise FreeVariable(f"no parameter w{t.index}")
    return params[t.index](k)


_OPS = {
    "=": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
}


def eval_formula(
    phi: Formula,
    codes_out: Sequence[Sequence[int]],
    params: Sequence[Real] = (),
    env: Optional[Mapping[str, int]] = None,
) -> bool:
    """Truth value of ``phi`` for fixed code outputs and parameter reals."""
    env = dict(env or {})
    if isinstance(phi, Cmp):
        return _OPS[phi.op](eval_term(phi.left, codes_out, params, env), eval_term(phi.right, codes_out, params, env))
    if isinstance(phi, Not):
        return not eval_formula(phi.body, codes_out, params, env)
    if isinstance(phi, And):
        return eval_formula(phi.left, codes_out, params, env) and eval_formula(phi.right, codes_out, params, env)
    if isinstance(phi, Or):
        return eval_formula(phi.left, codes_out, params, env) or eval_formula(phi.right, codes_out, params, env)
    bound = eval_term(phi.bound, codes_out, params, env)
    test = any if phi.kind == "exists" else all
    return test(eval_formula(phi.body, codes_out, params, {**env, phi.var: i}) for i in range(bound))
