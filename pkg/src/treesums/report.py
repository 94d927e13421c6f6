"""Pass/fail records shared by all verification routines."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .algebra import Series


@dataclass
class VerificationReport:
    name: str
    identity: str
    passed: bool
    order: int | None = None
    first_mismatch: int | None = None
    details: dict[str, Any] = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        where = "" if self.first_mismatch is None else f" (first mismatch at t^{self.first_mismatch})"
        return f"[{status}] {self.name}: {self.identity}{where}"

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "identity": self.identity,
            "passed": self.passed,
            "order": self.order,
            "first_mismatch": self.first_mismatch,
            "details": {k: str(v) for k, v in self.details.items()},
        }


def compare_series(name: str, identity: str, lhs: Series, rhs: Series, **details) -> VerificationReport:
    """Report whether two series agree up to the smaller of their orders."""
    n = min(lhs.order, rhs.order)
    bad = (lhs.truncate(n) - rhs.truncate(n)).first_nonzero()
    return VerificationReport(name, identity, bad is None, n, bad, dict(details))


def zero_residual(name: str, identity: str, residual: Series, **details) -> VerificationReport:
    bad = residual.first_nonzero()
    return VerificationReport(name, identity, bad is None, residual.order, bad, dict(details))
