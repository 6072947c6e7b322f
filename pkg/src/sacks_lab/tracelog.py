"""Line-oriented trace records shared by the engines and the CLI.

Each record is one line ``tag key=value ... verdict=pass``; values are
rendered deterministically so identical runs give identical bytes.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable


def _render(value: Any) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (list, tuple, dict)):
        return json.dumps(value, sort_keys=True, separators=(",", ":"))
    text = str(value)
    return json.dumps(text) if (not text or any(c.isspace() for c in text)) else text


@dataclass(frozen=True)
class Check:
    tag: str
    passed: bool
    fields: tuple[tuple[str, Any], ...] = ()

    def line(self) -> str:
        parts = [self.tag] + [f"{k}={_render(v)}" for k, v in self.fields]
        parts.append("verdict=" + ("pass" if self.passed else "fail"))
        return " ".join(parts)

    def to_json(self) -> dict:
        return {"tag": self.tag, "passed": self.passed, **{k: _jsonable(v) for k, v in self.fields}}


def _jsonable(v: Any) -> Any:
    if isinstance(v, (int, float, bool, str)) or v is None:
        return v
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    return str(v)


def check(tag: str, passed: bool, **fields: Any) -> Check:
    return Check(tag, bool(passed), tuple(fields.items()))


@dataclass
class Trace:
    checks: list[Check] = field(default_factory=list)

    def add(self, tag: str, passed: bool, **fields: Any) -> Check:
        c = check(tag, passed, **fields)
        self.checks.append(c)
        return c

    def extend(self, checks: Iterable[Check]) -> None:
        self.checks.extend(checks)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def lines(self) -> list[str]:
        return [c.line() for c in self.checks]
