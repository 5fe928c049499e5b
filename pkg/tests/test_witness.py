from __future__ import annotations

import numpy as np
import pytest

from arithreg.diophantine import TorusPoint
from arithreg.exceptions import InvalidArgumentError
from arithreg.witness import (
    Clamp,
    Const,
    ImPhase,
    Prod,
    Ramp,
    RePhase,
    StructureWitness,
    Sum,
    complement,
    expression_from_dict,
    merge_frequencies,
    torus_distance,
)


def sample_witness() -> StructureWitness:
    expr = Clamp(Sum((Const(0.25), Prod((Const(0.5), Ramp(0.3, 0.1, RePhase(0)))), Prod((Const(0.25), ImPhase(1))))))
    return StructureWitness(TorusPoint.of("1/3", "1/7"), expr)


class TestExpressions:
    def test_ramp_values(self):
        """Should be 0 below t - r, 1 from t on and linear in between."""
        ramp = Ramp(0.5, 0.25, RePhase(0))
        points = np.array([[0.5], [0.0], [np.arccos(0.375) / (2 * np.pi)]])
        assert ramp.evaluate(points) == pytest.approx([0.0, 1.0, 0.5])

    def test_bounds_compose(self):
        """Should add Lipschitz bounds in sums and use the product rule in products."""
        assert RePhase(0).bounds() == (1.0, 2 * np.pi)
        assert Sum((Const(0.5), RePhase(0))).bounds() == (1.5, pytest.approx(2 * np.pi))
        sup, lip = Prod((Const(0.5), RePhase(0))).bounds()
        assert sup == pytest.approx(0.5)
        assert lip == pytest.approx(np.pi)

    def test_complement(self):
        points = np.array([[0.0], [0.25]])
        assert complement(RePhase(0)).evaluate(points) == pytest.approx([0.0, 1.0])

    def test_rejects_non_positive_ramp_width(self):
        with pytest.raises(InvalidArgumentError):
            Ramp(0.5, 0.0, Const(1.0))

    def test_from_dict_rejects_unknown_tags(self):
        with pytest.raises(InvalidArgumentError):
            expression_from_dict({"tag": "spline"})
        with pytest.raises(InvalidArgumentError):
            expression_from_dict({"tag": "ramp", "threshold": 0.1})


class TestStructureWitness:
    def test_json_round_trip_preserves_values(self):
        witness = sample_witness()
        restored = StructureWitness.from_dict(witness.to_dict())
        assert np.array_equal(restored.evaluate_on(50), witness.evaluate_on(50))
        assert restored.lip_bound == pytest.approx(witness.lip_bound)

    def test_complexity_covers_dimension_and_lipschitz_norm(self):
        witness = sample_witness()
        assert witness.complexity == max(2.0, witness.lip_bound)

    def test_constant_witness(self):
        witness = StructureWitness.constant(0.5)
        assert witness.dim == 0
        assert witness.evaluate_on(3).tolist() == [0.5, 0.5, 0.5]

    def test_rejects_coordinates_beyond_dimension(self):
        with pytest.raises(InvalidArgumentError):
            StructureWitness(TorusPoint.of("1/3"), RePhase(1))

    def test_spot_check_respects_recorded_bound(self):
        """Should find no sampled pair violating the Lipschitz bound."""
        passed, worst = sample_witness().spot_check_lipschitz(samples=512, seed=4)
        assert passed
        assert worst <= sample_witness().lipschitz_constant

    def test_evaluate_on_uses_exact_orbit(self):
        witness = StructureWitness(TorusPoint.of("1/4"), RePhase(0))
        assert witness.evaluate_on(4) == pytest.approx([0.0, -1.0, 0.0, 1.0], abs=1e-15)


def test_merge_frequencies_keeps_first_seen_order():
    merged, mappings = merge_frequencies([TorusPoint.of("1/3"), TorusPoint.of("1/5", "1/3")])
    assert merged == TorusPoint.of("1/3", "1/5")
    assert mappings == [{0: 0}, {0: 1, 1: 0}]


def test_torus_distance_wraps():
    x = np.array([[0.95, 0.0]])
    y = np.array([[0.05, 0.0]])
    assert torus_distance(x, y) == pytest.approx([0.1])
