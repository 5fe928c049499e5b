"""Verification report helpers shared by every certificate type."""
from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field
from typing import Any


@dataclass(slots=True)
class ClauseResult:
    """Outcome of a single certificate clause."""

    name: str
    passed: bool
    measured: float | str | None = None
    bound: float | str | None = None
    detail: str | None = None

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        result: dict[str, Any] = {"name": self.name, "passed": self.passed}
        if self.measured is not None:
            result["measured"] = self.measured
        if self.bound is not None:
            result["bound"] = self.bound
        if self.detail is not None:
            result["detail"] = self.detail
        return result


@dataclass(slots=True)
class VerificationReport:
    """Per-clause pass/fail record produced by the ``verify`` helpers.

    Example:
        >>> report = VerificationReport([ClauseResult("sum", True), ClauseResult("sml_l2", False)])
        >>> report.passed, report.failures
        (False, ['sml_l2'])
    """

    clauses: list[ClauseResult] = field(default_factory=list)

    @classmethod
    def from_clauses(cls, clauses: Iterable[ClauseResult]) -> VerificationReport:
        return cls(list(clauses))

    def add(self, name: str, passed: bool, **details: Any) -> ClauseResult:
        clause = ClauseResult(name=name, passed=bool(passed), **details)
        self.clauses.append(clause)
        return clause

    @property
    def passed(self) -> bool:
        return all(clause.passed for clause in self.clauses)

    @property
    def failures(self) -> list[str]:
        return [clause.name for clause in self.clauses if not clause.passed]

    def clause(self, name: str) -> ClauseResult:
        for clause in self.clauses:
            if clause.name == name:
                return clause
        raise KeyError(f"No clause named '{name}'")

    def to_dict(self) -> dict[str, Any]:
        return {
            "passed": self.passed,
            "clauses": [clause.to_dict() for clause in self.clauses],
        }
