"""Resolution-stamped pass/fail results."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from .projgeom import ResolutionParams


class Status(str, Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass
class Verdict:
    status: Status
    residuals: dict[str, float] = field(default_factory=dict)
    resolution: ResolutionParams | None = None
    witness: str | None = None
    reason: str | None = None
    flags: tuple[str, ...] = ()
    details: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.status is Status.FAIL and self.witness is None:
            raise ValueError("a FAIL verdict needs a witness")
        if self.status is Status.INCONCLUSIVE and self.reason is None:
            raise ValueError("an INCONCLUSIVE verdict needs a reason")

    @property
    def passed(self) -> bool:
        return self.status is Status.PASS

    def __bool__(self) -> bool:
        return self.passed

    @classmethod
    def ok(cls, r: ResolutionParams | None = None, **residuals: float) -> "Verdict":
        return cls(Status.PASS, dict(residuals), r)

    @classmethod
    def fail(cls, witness: str, r: ResolutionParams | None = None, reason: str | None = None,
             flags: tuple[str, ...] = (), **residuals: float) -> "Verdict":
        return cls(Status.FAIL, dict(residuals), r, witness=witness, reason=reason, flags=flags)

    @classmethod
    def inconclusive(cls, reason: str, r: ResolutionParams | None = None, **residuals: float) -> "Verdict":
        return cls(Status.INCONCLUSIVE, dict(residuals), r, reason=reason)


def combine(verdicts: list[Verdict], r: ResolutionParams | None = None) -> Verdict:
    """First FAIL wins, then first INCONCLUSIVE, else PASS with merged residual maxima."""
    for v in verdicts:
        if v.status is Status.FAIL:
            return v
    for v in verdicts:
        if v.status is Status.INCONCLUSIVE:
            return v
    merged: dict[str, float] = {}
    for v in verdicts:
        for k, val in v.residuals.items():
            merged[k] = max(merged.get(k, val), val)
    return Verdict(Status.PASS, merged, r)
