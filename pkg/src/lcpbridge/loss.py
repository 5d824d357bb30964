"""Information-loss reporting.

Every adapter step records what it dropped, coerced or renamed; the final
report for a migration is the union of the planner's static prediction and
the entries collected while executing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

SEVERITIES = ("info", "warning", "loss")

# Fixed reason-code enumeration. Adapters must pick from this list so that
# reports are machine-matchable.
REASON_CODES = (
    "TYPE_COERCED",            # source type narrowed/widened to a pivot primitive
    "TYPE_DEFAULTED",          # no evidence for a type; str assumed
    "ASSOCIATIONS_UNKNOWN",    # associations absent from the source or at risk in the target
    "GENERALIZATION_FLATTENED",  # inheritance encoded by repeating columns
    "ONE_TO_ONE_FLATTENED",    # one-to-one encoded like many-to-one
    "MULTIPLICITY_RELAXED",    # a bound the target format cannot enforce
    "RENAMED",                 # identifier sanitized to fit the pivot/target rules
    "DROPPED",                 # element has no representation in the target
    "THIRD_PARTY_REQUIRED",    # capability exists but needs an external tool
    "REFERENCE_CANDIDATE",     # heuristic many-to-one suggestion, never materialized
    "LLM_INFERRED",            # element recovered from an image by a vision model
)


@dataclass(frozen=True)
class LossItem:
    element_kind: str
    element_name: str
    reason: str
    severity: str = "warning"
    detail: str = ""

    def as_dict(self) -> dict:
        return {
            "element_kind": self.element_kind,
            "element_name": self.element_name,
            "reason": self.reason,
            "severity": self.severity,
            "detail": self.detail,
        }


@dataclass
class LossReport:
    items: list[LossItem] = field(default_factory=list)

    def add(self, element_kind: str, element_name: str, reason: str,
            severity: str = "warning", detail: str = "") -> None:
        if reason not in REASON_CODES:
            raise ValueError(f"unknown loss reason code: {reason}")
        if severity not in SEVERITIES:
            raise ValueError(f"unknown severity: {severity}")
        self.items.append(LossItem(element_kind, element_name, reason, severity, detail))

    def extend(self, other: "LossReport") -> None:
        self.items.extend(other.items)

    def union(self, other: "LossReport") -> "LossReport":
        """Predicted-plus-actual merge, deduplicating identical entries."""
        merged = LossReport(list(self.items))
        seen = set(self.items)
        for item in other.items:
            if item not in seen:
                merged.items.append(item)
                seen.add(item)
        return merged

    def with_reason(self, reason: str) -> list[LossItem]:
        return [i for i in self.items if i.reason == reason]

    def to_json(self) -> str:
        payload = {"items": [i.as_dict() for i in self.items]}
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "LossReport":
        payload = json.loads(text)
        report = cls()
        for raw in payload.get("items", []):
            report.add(raw["element_kind"], raw["element_name"], raw["reason"],
                       raw.get("severity", "warning"), raw.get("detail", ""))
        return report

    def summary(self) -> str:
        """One human line per entry, for the CLI's error stream."""
        if not self.items:
            return "no information loss recorded"
        lines = []
        for i in self.items:
            detail = f" ({i.detail})" if i.detail else ""
            lines.append(f"[{i.severity}] {i.reason}: {i.element_kind} {i.element_name}{detail}")
        return "\n".join(lines)

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __bool__(self) -> bool:
        return bool(self.items)
