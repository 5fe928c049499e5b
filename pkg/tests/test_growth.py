from __future__ import annotations

import math
from fractions import Fraction

import pytest

from arithreg.exceptions import InvalidArgumentError, ResourceBudgetError
from arithreg.growth import GrowthFunction, parse_growth


class TestParseGrowth:
    def test_poly(self):
        growth = parse_growth("poly:10,1")
        assert growth(3) == pytest.approx(30.0)
        assert growth.spec == "poly:10,1"

    def test_exp(self):
        growth = parse_growth("exp:2")
        assert growth(5) == pytest.approx(64.0)
        assert growth.exact(5) == 64

    def test_table_interpolates_between_knots(self):
        """Should interpolate linearly through (0, 0) and the knots."""
        growth = parse_growth("table:1=10,3=50")
        assert growth(0.5) == pytest.approx(5.0)
        assert growth(2) == pytest.approx(30.0)
        assert growth(4) == pytest.approx(70.0)

    def test_spec_round_trip(self):
        for text in ("poly:10,1", "poly:1/100,1", "exp:3", "table:1=2,4=9"):
            assert parse_growth(parse_growth(text).spec).spec == parse_growth(text).spec

    @pytest.mark.parametrize(
        "growth",
        [
            GrowthFunction.poly(Fraction(1, 100), 1),
            GrowthFunction.exp(3),
            GrowthFunction.table([(1, 2), (4, 9)]),
            GrowthFunction.poly(Fraction(1, 100), 1).inflate(16).inflate(16),
        ],
        ids=["poly", "exp", "table", "inflated"],
    )
    def test_written_specs_parse_back(self, growth):
        parsed = parse_growth(growth.spec)
        assert parsed.spec == growth.spec
        assert parsed.kind == growth.kind
        assert parsed(2) == pytest.approx(growth(2))

    def test_inflated_spec_keeps_base(self):
        growth = parse_growth("inflate(4)[exp:1]")
        assert growth.kind == "inflated"
        assert growth.exact(1) == 16

    def test_malformed_inflated_spec(self):
        with pytest.raises(InvalidArgumentError):
            parse_growth("inflate(16)[poly:1]")
        with pytest.raises(InvalidArgumentError):
            parse_growth("inflate(0)[poly:1,1]")

    def test_errors_name_the_offending_token(self):
        with pytest.raises(InvalidArgumentError, match="'ten'"):
            parse_growth("poly:ten,1")
        with pytest.raises(InvalidArgumentError, match="'3'"):
            parse_growth("table:1=2,3")
        with pytest.raises(InvalidArgumentError, match="'cubic'"):
            parse_growth("cubic:1")

    def test_rejects_non_increasing_table(self):
        with pytest.raises(InvalidArgumentError):
            parse_growth("table:1=5,2=5")

    def test_rejects_non_positive_parameters(self):
        with pytest.raises(InvalidArgumentError):
            parse_growth("poly:-1,1")

    def test_rejects_missing_kind(self):
        with pytest.raises(InvalidArgumentError):
            parse_growth("10,1")


class TestGrowthFunction:
    def test_inflate(self):
        """Should evaluate F(c·M²)."""
        growth = GrowthFunction.poly(1, 1).inflate(16)
        assert growth(2) == pytest.approx(64.0)
        assert growth.exact(Fraction(1, 2)) == 4
        assert growth.spec == "inflate(16)[poly:1,1]"

    def test_ceil_value_is_capped(self):
        growth = parse_growth("poly:10,1")
        assert growth.ceil_value(Fraction(31, 10)) == 31
        assert growth.ceil_value(1000, cap=512) == 512

    def test_exp_saturates_at_cap(self):
        growth = parse_growth("exp:1")
        assert growth.exact(10**6, cap=4096) == 4096

    def test_exp_without_cap_refuses_huge_arguments(self):
        with pytest.raises(ResourceBudgetError):
            parse_growth("exp:1").exact(10**6)

    def test_overflow_is_infinite(self):
        assert math.isinf(parse_growth("exp:1")(1e6))

    def test_negative_argument(self):
        with pytest.raises(InvalidArgumentError):
            parse_growth("poly:1,1")(-1)

    def test_check_monotone(self):
        assert parse_growth("poly:2,3").check_monotone([1, 2, 3, 10])
