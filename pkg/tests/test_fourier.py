from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arithreg.exceptions import InvalidArgumentError
from arithreg.fourier import (
    IntervalFunction,
    Spectrum,
    correlation,
    dft,
    fourier_correlations,
    idft,
    l2_norm,
    u2_fourth_power_cyclic,
    u2_norm_cyclic,
    u2_norm_interval,
)
from arithreg.testing import random_complex_function, random_function, u2_interval_oracle, u2_quadruple_average


class TestIntervalFunction:
    def test_embed_places_values_at_their_residues(self):
        """Should zero-extend f so that position n holds f(n)."""
        f = IntervalFunction.from_values([0.25, 0.5, 0.75])
        assert f.ambient_modulus == 6
        assert f.embed().tolist() == [0.0, 0.25, 0.5, 0.75, 0.0, 0.0]

    def test_rejects_small_modulus(self):
        """Should refuse an ambient group smaller than 2N."""
        with pytest.raises(InvalidArgumentError):
            IntervalFunction.from_values([1.0, 1.0, 1.0], modulus=5)

    def test_rejects_empty_values(self):
        with pytest.raises(InvalidArgumentError):
            IntervalFunction.from_values([])

    def test_indicator_checks_members(self):
        """Should reject members outside [N]."""
        assert IntervalFunction.indicator(4, [1, 3]).values.tolist() == [1.0, 0.0, 1.0, 0.0]
        with pytest.raises(InvalidArgumentError):
            IntervalFunction.indicator(4, [5])

    def test_arithmetic_keeps_the_larger_modulus(self):
        f = IntervalFunction.from_values([1.0, 0.0], modulus=4)
        g = IntervalFunction.from_values([0.5, 0.5], modulus=6)
        total = f + g
        assert total.ambient_modulus == 6
        assert total.values.tolist() == [1.5, 0.5]
        assert (f - g).values.tolist() == [0.5, -0.5]
        assert (2 * f).values.tolist() == [2.0, 0.0]

    def test_length_mismatch(self):
        with pytest.raises(InvalidArgumentError):
            IntervalFunction.from_values([1.0]) + IntervalFunction.from_values([1.0, 2.0])


class TestTransforms:
    def test_constant_spectrum(self):
        """Should put all the mass of a constant at r = 0."""
        spectrum = dft([1.0] * 8)
        assert spectrum.coeffs[0] == pytest.approx(1.0)
        assert np.allclose(spectrum.coeffs[1:], 0.0)

    def test_inverse_round_trip(self):
        f = random_complex_function(20, seed=3).embed()
        assert np.allclose(idft(dft(f)), f, atol=1e-12)

    def test_spectrum_shape_is_checked(self):
        with pytest.raises(InvalidArgumentError):
            Spectrum(4, np.zeros(3, dtype=np.complex128))

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(-1, 1, allow_nan=False), min_size=1, max_size=64))
    def test_parseval(self, values):
        """Should satisfy Σ|f̂(r)|² = E|f|²."""
        spectrum = dft(values)
        assert spectrum.energy() == pytest.approx(float(np.mean(np.square(values))), abs=1e-9)

    def test_fourier_correlations_match_definition(self):
        f = random_function(10, seed=5)
        ns = np.arange(1, 11)
        r = 7
        expected = np.mean(f.values * np.exp(-2j * np.pi * r * ns / f.ambient_modulus))
        assert fourier_correlations(f)[r] == pytest.approx(expected)

    def test_correlation_and_l2(self):
        f = IntervalFunction.from_values([1.0, -1.0, 1.0, -1.0])
        assert l2_norm(f) == pytest.approx(1.0)
        assert correlation(f, f) == pytest.approx(1.0)


class TestU2:
    def test_constant_one_has_norm_one(self):
        """Should normalise by the indicator of [N]."""
        assert u2_norm_interval(IntervalFunction.constant(16, 1.0)) == pytest.approx(1.0, abs=1e-12)

    def test_interval_in_z8(self):
        """Should count 44 additive quadruples for 1_[4] inside Z/8Z."""
        indicator = IntervalFunction.constant(4, 1.0).embed(8)
        assert u2_norm_cyclic(indicator) == pytest.approx((44 / 512) ** 0.25, abs=1e-12)

    def test_direct_matches_spectral_on_random_functions(self):
        """Should agree to 1e-9 on 200 seeded functions."""
        rng = np.random.default_rng(0)
        for seed in range(200):
            n = int(rng.integers(1, 257))
            f = random_function(n, seed)
            direct = u2_norm_interval(f, method="direct")
            spectral = u2_norm_interval(f, method="spectral")
            assert direct == pytest.approx(spectral, abs=1e-9)

    def test_fourth_power_is_sum_of_fourth_moments(self):
        f = random_complex_function(32, seed=11).embed()
        assert u2_fourth_power_cyclic(f, method="direct") == pytest.approx(
            float(np.sum(np.abs(dft(f).coeffs) ** 4)), abs=1e-9
        )

    def test_independent_of_ambient_modulus(self):
        """Should give the same interval norm for M = 2N and M = 3N."""
        for seed in range(20):
            f = random_function(40, seed)
            assert u2_norm_interval(f.with_modulus(80)) == pytest.approx(
                u2_norm_interval(f.with_modulus(120)), abs=1e-9
            )

    def test_triangle_inequality(self):
        """Should satisfy the triangle inequality on 100 seeded pairs."""
        rng = np.random.default_rng(21)
        for seed in range(100):
            n = int(rng.integers(1, 97))
            f, g = random_function(n, 2 * seed), random_function(n, 2 * seed + 1)
            assert u2_norm_interval(f + g) <= u2_norm_interval(f) + u2_norm_interval(g) + 1e-9

    def test_matches_quadruple_oracle_exhaustively(self):
        """Should match the O(M³) quadruple average on every 0/1 function with N <= 6."""
        for n in range(1, 7):
            for bits in itertools.product((0.0, 1.0), repeat=n):
                f = IntervalFunction.from_values(bits)
                assert u2_norm_interval(f, method="direct") == pytest.approx(u2_interval_oracle(f), abs=1e-12)

    def test_oracle_agrees_on_complex_input(self):
        values = random_complex_function(5, seed=2).embed()
        assert u2_quadruple_average(values).real == pytest.approx(
            u2_fourth_power_cyclic(values, method="spectral"), abs=1e-12
        )

    def test_unknown_method(self):
        with pytest.raises(InvalidArgumentError):
            u2_fourth_power_cyclic([1.0, 0.0], method="bogus")  # type: ignore[arg-type]

    def test_auto_uses_spectral_above_limit(self, config):
        """Should skip the quadratic pass when M exceeds direct_u2_limit."""
        small = config.with_overrides(direct_u2_limit=4)
        f = random_function(10, seed=1)
        assert u2_norm_interval(f, config=small) == pytest.approx(u2_norm_interval(f, method="direct"), abs=1e-12)
