from __future__ import annotations

import json
import logging

import numpy as np
import pytest

from arithreg import regularity
from arithreg.exceptions import ApproximationError, InvalidArgumentError
from arithreg.factors import Factor, conditional_expectation, join
from arithreg.fourier import IntervalFunction
from arithreg.growth import GrowthFunction, parse_growth
from arithreg.inverse import MeasurableSet
from arithreg.regularity import (
    RegularityCertificate,
    approximate_conditional_expectation,
    max_stages,
    regularize,
    verify_certificate,
)
from arithreg.reports import ClauseResult, VerificationReport
from arithreg.synth import synthesize
from arithreg.telemetry import TelemetryReporter
from arithreg.testing import random_function

GROWTH = parse_growth("poly:10,1")


@pytest.fixture(scope="module")
def periodic_certificate() -> tuple[IntervalFunction, RegularityCertificate]:
    f = synthesize("cosine:1,4", 256)
    return f, regularize(f, 0.25, GROWTH)


class TestRegularize:
    def test_stage_budget(self):
        assert max_stages(0.25) == 65

    def test_random_functions_pass_every_clause(self):
        """Should certify 25 seeded functions on [512] within the stage budget."""
        for seed in range(25):
            f = random_function(512, seed)
            cert = regularize(f, 0.25, GROWTH)
            assert cert.report is not None
            assert cert.report.passed, cert.report.failures
            assert len(cert.stages) <= 65
            assert cert.l2_of_sml <= 0.25
            assert cert.u2_of_unf <= 1 / GROWTH(cert.m_value) + 1e-9

    def test_periodic_function(self, periodic_certificate):
        """Should capture a period-4 cosine in the structured part."""
        f, cert = periodic_certificate
        assert cert.report is not None and cert.report.passed, cert.report.failures
        total = cert.f_str.values + cert.f_sml.values + cert.f_unf.values
        assert np.max(np.abs(total - f.values)) <= 1e-12
        assert np.allclose(cert.witness.evaluate_on(256), cert.f_str.values, atol=1e-12)
        assert cert.energies == sorted(cert.energies)

    def test_reports_stage_telemetry(self, monkeypatch):
        monkeypatch.delenv("ARITHREG_TELEMETRY_OPTOUT", raising=False)
        reporter = TelemetryReporter()
        regularize(synthesize("residue:1,3", 96), 0.5, GROWTH, reporter=reporter)
        events = {record.event for record in reporter.records}
        assert "regularize.stage" in events

    def test_constant_half(self):
        """Should put a constant function entirely into the structured part."""
        f = IntervalFunction.constant(128, 0.5)
        cert = regularize(f, 0.25, GROWTH)
        assert cert.report is not None and cert.report.passed, cert.report.failures
        assert np.allclose(cert.f_str.values, 0.5, atol=1e-12)
        assert np.max(np.abs(cert.f_sml.values)) <= 1e-12
        assert np.max(np.abs(cert.f_unf.values)) <= 1e-12

    def test_failed_self_check_still_returns(self, monkeypatch, caplog):
        """Should hand back the certificate with its failures instead of raising."""
        failing = VerificationReport([ClauseResult("sml_l2", False)])
        monkeypatch.setattr(regularity, "verify_certificate", lambda *args, **kwargs: failing)
        with caplog.at_level(logging.WARNING, logger="arithreg.regularity"):
            cert = regularize(IntervalFunction.constant(64, 0.5), 0.25, GROWTH)
        assert cert.report is failing
        assert cert.report.failures == ["sml_l2"]
        assert "sml_l2" in caplog.text

    def test_rejects_bad_inputs(self):
        f = random_function(16, 0)
        with pytest.raises(InvalidArgumentError):
            regularize(f, 0.0, GROWTH)
        with pytest.raises(InvalidArgumentError):
            regularize(IntervalFunction.from_values([0.5, 1.5]), 0.25, GROWTH)

    def test_overflowing_growth(self):
        with pytest.raises(InvalidArgumentError, match="overflows"):
            regularize(synthesize("cosine:1,4", 32), 0.25, GrowthFunction.exp("1e308"))


class TestVerifyCertificate:
    def test_tampered_certificate_names_failing_clause(self, periodic_certificate):
        f, cert = periodic_certificate
        payload = cert.to_dict()
        payload["f_str"][0] += 0.1
        tampered = RegularityCertificate.from_dict(payload)
        report = verify_certificate(tampered, f, 0.25, GROWTH)
        assert not report.passed
        assert "sum" in report.failures
        assert "witness_eval" in report.failures

    def test_round_trip_reverifies(self, periodic_certificate):
        f, cert = periodic_certificate
        restored = RegularityCertificate.from_dict(json.loads(json.dumps(cert.to_dict())))
        assert verify_certificate(restored, f, 0.25, GROWTH).passed

    def test_length_mismatch_fails_sum(self, periodic_certificate):
        _, cert = periodic_certificate
        report = verify_certificate(cert, random_function(10, 0), 0.25, GROWTH)
        assert report.failures == ["sum"]

    def test_report_serializes_every_clause(self, periodic_certificate):
        _, cert = periodic_certificate
        assert cert.report is not None
        names = [clause["name"] for clause in cert.report.to_dict()["clauses"]]
        assert names == [
            "sum",
            "sml_l2",
            "unf_u2",
            "str_range",
            "str_sml_range",
            "witness_eval",
            "witness_complexity",
            "witness_lipschitz",
        ]


class TestConditionalExpectationWitness:
    def test_needs_generated_factor(self):
        factor = Factor.from_cells(4, [[1, 2], [3, 4]])
        with pytest.raises(InvalidArgumentError):
            approximate_conditional_expectation(IntervalFunction.constant(4, 0.5), factor, 0.1)

    def test_trivial_factor_gives_constant(self):
        witness = approximate_conditional_expectation(IntervalFunction.constant(4, 0.25), Factor.trivial(4), 0.1)
        assert witness.dim == 0
        assert witness.evaluate_on(4).tolist() == [0.25] * 4

    def test_certified_cells(self, periodic_certificate):
        """Should approximate cell averages through generator witnesses."""
        _, cert = periodic_certificate
        f = synthesize("cosine:1,4", 256)
        g = conditional_expectation(f, cert.factor)
        witness = approximate_conditional_expectation(g, cert.factor, 0.05)
        error = float(np.sqrt(np.mean((witness.evaluate_on(256) - g.values) ** 2)))
        assert error <= 0.05

    def test_unknown_generator_set(self):
        e = MeasurableSet.from_members(4, [1, 2])
        factor = join(Factor.trivial(4), e)
        with pytest.raises(ApproximationError):
            approximate_conditional_expectation(IntervalFunction.from_values([1.0, 1.0, 0.0, 0.0]), factor, 0.1)
