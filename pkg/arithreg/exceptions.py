"""Custom exceptions raised by arithreg."""
from __future__ import annotations

from collections.abc import Sequence
from typing import Any


class ArithRegError(Exception):
    """Base class for arithreg errors."""


class InvalidArgumentError(ArithRegError, ValueError):
    """Raised when an operation receives malformed or out-of-range input."""


class ConsistencyError(ArithRegError):
    """Raised when a mathematical identity fails beyond the configured tolerance."""


class ResourceBudgetError(ArithRegError):
    """Raised when an enumeration or sampling budget would be exceeded."""

    def __init__(self, message: str, *, bound: Any = None, budget: Any = None) -> None:
        self.bound = bound
        self.budget = budget
        super().__init__(message)


class ApproximationError(ResourceBudgetError):
    """Raised when a requested approximation target cannot be met."""

    def __init__(self, message: str, *, best_error: float, target: float) -> None:
        self.best_error = best_error
        self.target = target
        super().__init__(f"{message} (best error {best_error:.3e}, target {target:.3e})")


class WeakRegularityError(ArithRegError):
    """Raised when weak regularization exhausts its step budget."""

    def __init__(
        self,
        max_steps: int,
        energies: Sequence[float],
        u2_norms: Sequence[float],
    ) -> None:
        self.max_steps = max_steps
        self.energies = list(energies)
        self.u2_norms = list(u2_norms)
        last = self.u2_norms[-1] if self.u2_norms else float("nan")
        super().__init__(
            f"Weak regularization did not converge within {max_steps} steps "
            f"(last U2 norm {last:.3e})"
        )


class GrowthAuditError(ArithRegError):
    """Raised when the inflated growth chain fails to dominate the target growth."""

    def __init__(self, outer: float, inner: float, target: float) -> None:
        self.outer = outer
        self.inner = inner
        self.target = target
        super().__init__(
            f"Growth audit failed: need F1(M1)={outer:.6g} >= F2(M2)={inner:.6g} >= F(M)={target:.6g}"
        )


class CertificateError(ArithRegError):
    """Raised when a certificate has failing clauses."""

    def __init__(self, failing_clauses: Sequence[str]) -> None:
        self.failing_clauses = list(failing_clauses)
        super().__init__(f"Certificate check failed: {', '.join(self.failing_clauses)}")


class ConfigNotFoundError(FileNotFoundError):
    """Raised when a configuration path is supplied but not found."""
