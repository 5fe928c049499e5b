"""Lightweight telemetry helpers for iterative pipelines."""
from __future__ import annotations

import logging
import os
import time
from collections.abc import Callable, Iterator
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any

from .utils import is_truthy

logger = logging.getLogger("arithreg.telemetry")


FeedbackHook = Callable[["TelemetryRecord"], None]


@dataclass(slots=True)
class TelemetryRecord:
    """Payload representing a single loop iteration or pipeline stage."""

    event: str
    status: str
    duration_ms: float
    metadata: dict[str, Any] = field(default_factory=dict)
    timestamp: float = field(default_factory=lambda: time.time())


class TelemetryReporter:
    """Dispatches telemetry records to an optional feedback hook.

    Records are kept in memory (``records``) and forwarded to ``feedback_hook``.
    Setting ``ARITHREG_TELEMETRY_OPTOUT`` disables both.
    """

    def __init__(self, *, enabled: bool = True, feedback_hook: FeedbackHook | None = None) -> None:
        self.enabled = enabled and not is_truthy(os.getenv("ARITHREG_TELEMETRY_OPTOUT"))
        self.feedback_hook = feedback_hook
        self.records: list[TelemetryRecord] = []

    def record(self, event: str, status: str, duration_ms: float, **metadata: Any) -> None:
        if not self.enabled:
            return

        record = TelemetryRecord(
            event=event,
            status=status,
            duration_ms=duration_ms,
            metadata=metadata,
        )
        self.records.append(record)
        logger.debug("%s %s in %.3f ms: %s", event, status, duration_ms, metadata)

        if self.feedback_hook:
            try:
                self.feedback_hook(record)
            except Exception as exc:  # pragma: no cover - feedback errors are soft-fail
                logger.debug("Feedback hook failed: %s", exc)

    @contextmanager
    def span(self, event: str, **metadata: Any) -> Iterator[dict[str, Any]]:
        """Time a block; the yielded dict can be filled with extra metadata."""
        extra: dict[str, Any] = dict(metadata)
        start = time.perf_counter_ns()
        status = "ok"
        try:
            yield extra
        except Exception as exc:
            status = "error"
            extra["error_class"] = exc.__class__.__name__
            raise
        finally:
            duration_ms = (time.perf_counter_ns() - start) / 1_000_000
            self.record(event, status, duration_ms, **extra)


NULL_REPORTER = TelemetryReporter(enabled=False)
