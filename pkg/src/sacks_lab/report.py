from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class FusionReport:
    """Outcome of a batch of checks.

    ``failures`` holds ``(index, check, detail)`` triples; the report is ok
    exactly when there are none.  ``notes`` records non-failing observations
    such as exemptions.
    """

    failures: list[tuple[int, str, str]] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def fail(self, index: int, check: str, detail: str = "") -> None:
        self.failures.append((index, check, detail))

    def failed_indices(self) -> list[int]:
        return sorted({i for i, _, _ in self.failures})

    def __bool__(self) -> bool:
        return self.ok

    def lines(self) -> list[str]:
        out = [f"ok={str(self.ok).lower()} failures={len(self.failures)}"]
        out += [f"fail index={i} check={c} detail={d}" for i, c, d in self.failures]
        out += [f"note {n}" for n in self.notes]
        return out
