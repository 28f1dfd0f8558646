"""Check reports with deterministic serialization."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

PASS = "pass"
FAIL = "fail"
VACUOUS = "vacuous"
UNKNOWN = "unknown"

_NON_FAILING = {PASS, VACUOUS, UNKNOWN}


def plain(obj):
    """Convert sets/tuples (recursively) into sorted JSON-friendly lists."""
    if isinstance(obj, (set, frozenset)):
        return sorted((plain(x) for x in obj), key=_sort_key)
    if isinstance(obj, (list, tuple)):
        return [plain(x) for x in obj]
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))}
    return obj


def _sort_key(x):
    return json.dumps(x, sort_keys=True)


@dataclass
class CheckReport:
    name: str
    status: str = PASS
    witnesses: list = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return self.status in _NON_FAILING

    def fail(self, witness) -> None:
        self.status = FAIL
        self.witnesses.append(witness)

    def to_dict(self, stable: bool = False) -> dict:
        d = {
            "name": self.name,
            "status": self.status,
            "passed": self.ok,
            "witnesses": sorted((plain(w) for w in self.witnesses), key=_sort_key),
            "notes": list(self.notes),
            "details": plain(self.details),
        }
        if not stable:
            d["seconds"] = round(self.seconds, 6)
        return d

    def line(self) -> str:
        head = f"[{self.status.upper():7}] {self.name}"
        if self.witnesses:
            head += f"  witness: {json.dumps(sorted((plain(w) for w in self.witnesses), key=_sort_key)[0])}"
        return head


def report_document(reports, stable: bool = False) -> dict:
    checks = sorted((r.to_dict(stable) for r in reports), key=lambda d: d["name"])
    return {
        "format": "check-report/1",
        "passed": all(c["passed"] for c in checks),
        "checks": checks,
    }
