from __future__ import annotations

import itertools
import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from arithreg.config import RegularityConfig
from arithreg.diophantine import (
    SubtorusChart,
    ThetaDecomposition,
    TorusPoint,
    bezout_vector,
    complete_unimodular,
    decompose_theta,
    determinant,
    find_irrational_point,
    is_irrational,
    l1_ball_size,
    verify_decomposition,
)
from arithreg.exceptions import InvalidArgumentError, ResourceBudgetError
from arithreg.growth import parse_growth
from arithreg.testing import frequency_count, irrationality_oracle


class TestTorusPoint:
    def test_coordinates_reduce_mod_one(self):
        point = TorusPoint.of("5/4", "-1/2", (7, 3))
        assert point.coords == (Fraction(1, 4), Fraction(1, 2), Fraction(1, 3))

    def test_rejects_floats(self):
        with pytest.raises(InvalidArgumentError):
            TorusPoint.of(0.5)

    def test_arithmetic(self):
        a = TorusPoint.of("1/3", "3/4")
        b = TorusPoint.of("2/3", "1/2")
        assert a + b == TorusPoint.of(0, "1/4")
        assert a - b == TorusPoint.of("2/3", "1/4")
        assert -a == TorusPoint.of("2/3", "1/4")
        assert a.dot((3, 4)) == 0
        assert a.common_denominator() == 12
        assert a.is_torsion(12) and not a.is_torsion(6)

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidArgumentError):
            TorusPoint.of("1/2") + TorusPoint.of("1/2", 0)

    def test_orbit_matches_exact_points(self):
        point = TorusPoint.of("3/7", "5/11")
        ns = np.arange(1, 50)
        expected = [[float(Fraction(3 * n, 7) % 1), float(Fraction(5 * n, 11) % 1)] for n in ns]
        assert point.orbit(ns).tolist() == expected

    def test_dict_round_trip(self):
        point = TorusPoint.of("123456789/1000000007", 0)
        assert TorusPoint.from_dict(point.to_dict()) == point

    def test_from_dict_checks_dimension(self):
        with pytest.raises(InvalidArgumentError):
            TorusPoint.from_dict({"dim": 2, "coords": [["1", "2"]]})


class TestIsIrrational:
    def test_half_fails_at_q_two(self):
        check = is_irrational(TorusPoint.of("1/2"), 3, 10)
        assert not check.passed
        assert check.counterexample == (2,)
        assert not irrationality_oracle(TorusPoint.of("1/2"), 3, 10)

    def test_agrees_with_box_scan(self):
        """Should agree with a brute-force scan over the box [-A, A]^d."""
        rng = np.random.default_rng(3)
        for _ in range(60):
            dim = int(rng.integers(1, 3))
            den = int(rng.integers(2, 200))
            point = TorusPoint(tuple(Fraction(int(rng.integers(0, den)), den) for _ in range(dim)))
            a_param = int(rng.integers(1, 8))
            n_param = int(rng.integers(a_param, 400))
            assert is_irrational(point, a_param, n_param).passed == irrationality_oracle(point, a_param, n_param)

    def test_counterexample_is_first_in_scan_order(self):
        check = is_irrational(TorusPoint.of("1/6", "1/6"), 6, 100)
        assert check.counterexample == (1, -1)

    def test_dimension_zero_passes(self):
        assert is_irrational(TorusPoint.zero(0), 5, 10).passed

    def test_enumeration_budget(self):
        config = RegularityConfig(enumeration_budget=10)
        with pytest.raises(ResourceBudgetError):
            is_irrational(TorusPoint.of("1/1000003", "2/1000003"), 20, 10, config=config)

    def test_rejects_bad_parameters(self):
        with pytest.raises(InvalidArgumentError):
            is_irrational(TorusPoint.of("1/2"), 0, 10)

    @pytest.mark.parametrize(("dim", "radius"), [(1, 5), (2, 4), (3, 3), (4, 2)])
    def test_ball_size(self, dim, radius):
        brute = sum(
            1
            for q in itertools.product(range(-radius, radius + 1), repeat=dim)
            if any(q) and sum(abs(v) for v in q) <= radius
        )
        assert l1_ball_size(dim, radius) == brute // 2 == frequency_count(dim, radius)


class TestCompleteUnimodular:
    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.integers(-50, 50), min_size=2, max_size=4))
    def test_determinant_and_last_row(self, vector):
        assume(math.gcd(*vector) == 1)
        chart = complete_unimodular(vector)
        assert determinant(chart.matrix) == 1
        assert list(chart.matrix[-1]) == vector
        assert chart.dim == len(vector) - 1

    def test_rejects_imprimitive(self):
        with pytest.raises(InvalidArgumentError):
            complete_unimodular([2, 4])

    def test_chart_inverse(self):
        chart = complete_unimodular([3, 5, 7])
        inverse = chart.inverse()
        product = [[sum(chart.matrix[i][k] * inverse[k][j] for k in range(3)) for j in range(3)] for i in range(3)]
        assert product == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]

    @pytest.mark.parametrize("vector", [[1], [-1], [6, 10, 15], [0, 7, -3], [4, 9]])
    def test_bezout_vector(self, vector):
        u = bezout_vector(vector)
        assert sum(q * v for q, v in zip(vector, u)) == 1

    def test_bezout_rejects_imprimitive(self):
        with pytest.raises(InvalidArgumentError):
            bezout_vector([6, 9])


class TestDecomposeTheta:
    def test_random_rational_points(self):
        """Should pass every clause for 50 seeded rational points."""
        growth = parse_growth("poly:2,1")
        rng = np.random.default_rng(11)
        for _ in range(50):
            dim = int(rng.integers(1, 4))
            point = TorusPoint(
                tuple(Fraction(int(rng.integers(0, 10**6)), int(rng.integers(1, 10**6 + 1))) for _ in range(dim))
            )
            decomposition = decompose_theta(point, 10_000, growth)
            report = verify_decomposition(decomposition, growth)
            assert report.passed, (point, report.failures)
            assert decomposition.iterations <= dim

    def test_third_is_rational(self):
        growth = parse_growth("poly:3,1")
        decomposition = decompose_theta(TorusPoint.of("1/3"), 100, growth)
        assert decomposition.rational == TorusPoint.of("1/3")
        assert decomposition.torsion_order == 3
        assert decomposition.chart.dim == 0
        assert verify_decomposition(decomposition, growth).passed

    def test_irrational_point_is_untouched(self):
        growth = parse_growth("poly:2,1")
        point, _ = find_irrational_point(8, 100_000, 2)
        decomposition = decompose_theta(point, 100_000, growth, start_m=4)
        assert decomposition.iterations == 0
        assert decomposition.irrational == point
        assert decomposition.chart == SubtorusChart.identity(2)

    def test_to_dict(self):
        decomposition = decompose_theta(TorusPoint.of("1/3"), 100, parse_growth("poly:3,1"))
        payload = decomposition.to_dict()
        assert payload["torsion_order"] == 3
        assert payload["rational"]["coords"] == [["1", "3"]]

    def test_from_dict_reverifies(self):
        growth = parse_growth("poly:2,1")
        point = TorusPoint.of("1/3", "7/100003")
        decomposition = decompose_theta(point, 10_000, growth)
        restored = ThetaDecomposition.from_dict(json.loads(json.dumps(decomposition.to_dict())))
        assert restored.chart == decomposition.chart
        assert restored.irrational_coordinates == decomposition.irrational_coordinates
        assert [c.passed for c in restored.checks] == [c.passed for c in decomposition.checks]
        assert verify_decomposition(restored, growth).passed


class TestFindIrrationalPoint:
    @pytest.mark.parametrize("dim", [1, 2])
    def test_certified_by_box_scan(self, dim):
        point, check = find_irrational_point(12, 1000, dim)
        assert check.passed
        assert irrationality_oracle(point, 12, 1000)

    def test_rejects_dimension(self):
        with pytest.raises(InvalidArgumentError):
            find_irrational_point(5, 100, 0)
