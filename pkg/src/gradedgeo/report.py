"""Check reports: a title, failure records, and counts of what was examined."""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Failure:
    check: str
    where: tuple = ()
    coordinate: str | None = None
    detail: str = ""

    def sort_key(self):
        return (self.check, tuple(map(str, self.where)), self.coordinate or "", self.detail)

    def to_dict(self) -> dict:
        return {"check": self.check, "where": list(self.where), "coordinate": self.coordinate, "detail": self.detail}

    def __str__(self):
        loc = ",".join(map(str, self.where))
        s = f"{self.check}"
        if loc:
            s += f" [{loc}]"
        if self.coordinate:
            s += f" {self.coordinate}"
        if self.detail:
            s += f": {self.detail}"
        return s


@dataclass
class Report:
    title: str
    failures: list = field(default_factory=list)
    checked: int = 0
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def __len__(self):
        return len(self.failures)

    def fail(self, check: str, where=(), coordinate=None, detail: str = ""):
        self.failures.append(Failure(check, tuple(where), coordinate, detail))

    def count(self, k: int = 1):
        self.checked += k

    def extend(self, other: "Report", prefix: str | None = None):
        for f in other.failures:
            self.failures.append(Failure(f"{prefix}.{f.check}" if prefix else f.check, f.where, f.coordinate, f.detail))
        self.checked += other.checked
        self.notes.extend(other.notes)

    def sorted_failures(self) -> list:
        return sorted(self.failures, key=Failure.sort_key)

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            "ok": self.ok,
            "checked": self.checked,
            "failures": [f.to_dict() for f in self.sorted_failures()],
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_text(self) -> str:
        head = f"{self.title}: {'PASS' if self.ok else 'FAIL'} ({self.checked} checks, {len(self.failures)} failures)"
        lines = [head] + [f"  - {f}" for f in self.sorted_failures()] + [f"  note: {n}" for n in self.notes]
        return "\n".join(lines)

    def __str__(self):
        return self.to_text()
