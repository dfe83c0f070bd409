from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

PASS = "PASS"
FAIL = "FAIL"
PRECONDITION = "PRECONDITION-FAILURE"
REGULAR = "REGULAR-certified"
VIOLATION = "THEOREM-VIOLATION"


@dataclass
class Report:
    """Outcome of a check: a verdict string, computed values and free-form details."""

    verdict: str
    values: dict = field(default_factory=dict)
    details: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.verdict in (PASS, REGULAR)

    def to_json(self) -> dict[str, Any]:
        return {"verdict": self.verdict, "values": self.values, "details": list(self.details)}
