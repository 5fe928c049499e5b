from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arithreg.exceptions import InvalidArgumentError, WeakRegularityError
from arithreg.factors import (
    Factor,
    cell_averages,
    conditional_expectation,
    energy,
    energy_increment_step,
    join,
    weak_regularize,
)
from arithreg.fourier import IntervalFunction, l2_norm, u2_norm_interval
from arithreg.inverse import MeasurableSet
from arithreg.synth import synthesize
from arithreg.telemetry import TelemetryReporter
from arithreg.testing import random_function


def random_factor(n: int, cells: int, rng: np.random.Generator) -> Factor:
    raw = rng.integers(0, cells, size=n)
    return Factor.from_cells(n, [np.flatnonzero(raw == j) + 1 for j in np.unique(raw)])


def random_set(n: int, rng: np.random.Generator, label: str = "E") -> MeasurableSet:
    return MeasurableSet.from_members(n, np.flatnonzero(rng.random(n) < 0.5) + 1, label=label)


class TestFactor:
    def test_cells_are_labelled_by_smallest_member(self):
        factor = Factor.from_cells(5, [[4, 5], [2], [1, 3]])
        assert factor.labels.tolist() == [0, 1, 0, 2, 2]
        assert [cell.members.tolist() for cell in factor.cells] == [[1, 3], [2], [4, 5]]

    def test_from_cells_validates_the_partition(self):
        with pytest.raises(InvalidArgumentError):
            Factor.from_cells(3, [[1, 2], [2, 3]])
        with pytest.raises(InvalidArgumentError):
            Factor.from_cells(3, [[1, 2]])
        with pytest.raises(InvalidArgumentError):
            Factor.from_cells(3, [[1, 2, 3], []])

    def test_trivial_and_discrete(self):
        assert Factor.trivial(6).complexity == 1
        assert Factor.discrete(6).complexity == 6
        assert Factor.discrete(6).refines(Factor.trivial(6))
        assert not Factor.trivial(6).refines(Factor.discrete(6))

    def test_join_intersects_cells(self):
        b = Factor.from_cells(6, [[1, 2, 3], [4, 5, 6]])
        e = MeasurableSet.from_members(6, [3, 4], label="E1")
        joined = join(b, e)
        assert [cell.members.tolist() for cell in joined.cells] == [[1, 2], [3], [4], [5, 6]]
        assert joined.generators == (e,)
        assert joined.refines(b)

    def test_signature_tracks_generator_membership(self):
        e1 = MeasurableSet.from_members(4, [1, 2], label="E1")
        e2 = MeasurableSet.from_members(4, [2, 3], label="E2")
        factor = join(join(Factor.trivial(4), e1), e2)
        assert factor.generated
        assert [factor.signature(label) for label in range(factor.complexity)] == [
            (True, False),
            (True, True),
            (False, True),
            (False, False),
        ]

    def test_dict_round_trip(self):
        e = MeasurableSet.from_members(5, [2, 4], label="E1")
        factor = join(Factor.trivial(5), e)
        payload = factor.to_dict()
        assert payload == {"n": 5, "cells": [[1, 3, 5], [2, 4]], "generators": ["E1"]}
        restored = Factor.from_dict(payload, {"E1": e})
        assert restored.same_partition(factor)
        with pytest.raises(InvalidArgumentError):
            Factor.from_dict(payload, {})


class TestProjectionLaws:
    def test_laws_on_random_pairs(self):
        """Should satisfy idempotence, contractivity, tower and nested Pythagoras to 1e-12."""
        rng = np.random.default_rng(5)
        for seed in range(100):
            n = int(rng.integers(1, 80))
            f = random_function(n, seed)
            b = random_factor(n, int(rng.integers(1, 8)), rng)
            finer = join(b, random_set(n, rng))
            projection = conditional_expectation(f, b)

            again = conditional_expectation(projection, b)
            assert np.allclose(again.values, projection.values, atol=1e-12)
            assert l2_norm(projection) <= l2_norm(f) + 1e-12

            tower = conditional_expectation(conditional_expectation(f, finer), b)
            assert np.allclose(tower.values, projection.values, atol=1e-12)

            difference = conditional_expectation(f, finer) - projection
            assert energy(f, finer) == pytest.approx(energy(f, b) + l2_norm(difference) ** 2, abs=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False), min_size=2, max_size=30))
    def test_complex_projection_preserves_cell_means(self, values):
        f = IntervalFunction.from_values(np.array(values, dtype=np.complex128))
        b = Factor.from_cells(len(values), [[1], list(range(2, len(values) + 1))])
        projection = conditional_expectation(f, b)
        assert np.allclose(cell_averages(projection, b), cell_averages(f, b), atol=1e-12)

    def test_energy_of_trivial_factor_is_squared_mean(self):
        f = IntervalFunction.from_values([0.0, 1.0, 1.0, 0.0])
        assert energy(f, Factor.trivial(4)) == pytest.approx(0.25)
        assert energy(f, Factor.discrete(4)) == pytest.approx(0.5)

    def test_length_mismatch(self):
        with pytest.raises(InvalidArgumentError):
            conditional_expectation(IntervalFunction.constant(3, 1.0), Factor.trivial(4))


class TestWeakRegularity:
    def test_increment_step_gains_energy(self):
        f = synthesize("cosine:1,8", 64)
        step = energy_increment_step(f, Factor.trivial(64), 0.1)
        assert step is not None
        assert step.gain > 0
        assert step.factor.complexity == 2
        assert step.factor.generators[0].label == "E1"

    def test_step_returns_none_for_uniform_residual(self):
        f = IntervalFunction.constant(32, 0.5)
        assert energy_increment_step(f, Factor.trivial(32), 0.1) is None

    def test_regularizes_periodic_function(self):
        """Should stop with a delta-uniform residual and increasing energies."""
        f = synthesize("mix:0.5@cosine:1,4;0.5@residue:0,3", 96)
        reporter = TelemetryReporter()
        result = weak_regularize(f, Factor.trivial(96), 0.05, reporter=reporter)
        assert all(b > a for a, b in zip(result.energies, result.energies[1:], strict=False))
        if result.stop_reason == "uniform":
            assert result.final_u2 <= 0.05
        residual = f - conditional_expectation(f, result.factor)
        assert u2_norm_interval(residual) == pytest.approx(result.final_u2, abs=1e-9)
        assert len(reporter.records) >= result.steps
        assert all(record.event == "weak_regularize.step" for record in reporter.records)

    def test_half_interval(self):
        """Should leave a residual of U² norm at most 0.2 for 1_{n <= N/2}."""
        f = IntervalFunction.indicator(256, range(1, 129))
        result = weak_regularize(f, Factor.trivial(256), 0.2)
        residual = f - conditional_expectation(f, result.factor)
        assert result.stop_reason == "uniform"
        assert u2_norm_interval(residual) <= 0.2
        assert result.final_u2 <= 0.2

    def test_random_function_trajectories(self):
        for seed in range(5):
            f = random_function(64, seed)
            result = weak_regularize(f, Factor.trivial(64), 0.2)
            assert result.stop_reason in ("uniform", "gain_floor")
            assert len(result.u2_norms) == result.steps + 1
            assert result.to_dict()["complexity"] == result.factor.complexity

    def test_exhausted_budget_raises(self):
        f = synthesize("cosine:1,8", 64)
        with pytest.raises(WeakRegularityError) as excinfo:
            weak_regularize(f, Factor.trivial(64), 0.01, max_steps=0)
        assert excinfo.value.max_steps == 0
