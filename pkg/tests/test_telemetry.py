from __future__ import annotations

import pytest

from arithreg.telemetry import NULL_REPORTER, TelemetryReporter


class TestTelemetryReporter:
    def test_span_records_metadata(self, monkeypatch):
        monkeypatch.delenv("ARITHREG_TELEMETRY_OPTOUT", raising=False)
        reporter = TelemetryReporter()
        with reporter.span("stage", index=1) as extra:
            extra["gain"] = 0.5
        (record,) = reporter.records
        assert record.event == "stage"
        assert record.status == "ok"
        assert record.metadata == {"index": 1, "gain": 0.5}
        assert record.duration_ms >= 0

    def test_span_records_errors(self, monkeypatch):
        monkeypatch.delenv("ARITHREG_TELEMETRY_OPTOUT", raising=False)
        reporter = TelemetryReporter()
        with pytest.raises(RuntimeError), reporter.span("stage"):
            raise RuntimeError("boom")
        assert reporter.records[0].status == "error"
        assert reporter.records[0].metadata["error_class"] == "RuntimeError"

    def test_opt_out(self, monkeypatch):
        monkeypatch.setenv("ARITHREG_TELEMETRY_OPTOUT", "true")
        reporter = TelemetryReporter()
        reporter.record("stage", "ok", 1.0)
        assert reporter.records == []

    def test_hook_receives_records(self, monkeypatch):
        monkeypatch.delenv("ARITHREG_TELEMETRY_OPTOUT", raising=False)
        seen = []
        reporter = TelemetryReporter(feedback_hook=seen.append)
        reporter.record("stage", "ok", 2.0, cells=4)
        assert [record.metadata for record in seen] == [{"cells": 4}]

    def test_hook_failure_is_swallowed(self, monkeypatch):
        monkeypatch.delenv("ARITHREG_TELEMETRY_OPTOUT", raising=False)

        def hook(record):
            raise ValueError("unreachable sink")

        reporter = TelemetryReporter(feedback_hook=hook)
        reporter.record("stage", "ok", 1.0)
        assert len(reporter.records) == 1

    def test_null_reporter_is_silent(self):
        NULL_REPORTER.record("stage", "ok", 1.0)
        assert NULL_REPORTER.records == []
