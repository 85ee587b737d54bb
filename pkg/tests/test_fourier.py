"""Tests for the coefficient tables, spectral sums, and Fejer evaluation.

Frozen reference values were computed by independent oracles (direct
complex-exponential sums and closed forms) and are asserted to full
precision where the implementation performs the identical finite sum.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spotfourier.fourier import (
    TWO_PI,
    CoefficientTable,
    ObservedIncrements,
    bohr_partial,
    fejer_polynomial,
    function_coefficients,
    increment_coefficients,
    jump_coefficients,
    read_coefficients_csv,
    write_coefficients_csv,
)


def direct_spectrum(times, weights, q_max):
    # independent oracle: plain double loop, no FFT, no vectorized phases
    out = np.empty(2 * q_max + 1, dtype=complex)
    for i, q in enumerate(range(-q_max, q_max + 1)):
        out[i] = sum(
            w * np.exp(-1j * q * t) for t, w in zip(times, weights)
        ) / TWO_PI
    return out


def symmetric_table(q_max, seed):
    rng = np.random.default_rng(seed)
    half = rng.normal(size=q_max + 1) + 1j * rng.normal(size=q_max + 1)
    half[0] = half[0].real
    values = np.concatenate((np.conj(half[:0:-1]), half))
    return CoefficientTable(q_max, values)


class TestCoefficientTable:
    def test_band_length_enforced(self):
        with pytest.raises(ValueError, match="length 5"):
            CoefficientTable(2, np.zeros(4, dtype=complex))

    def test_value_indexing(self):
        table = CoefficientTable(1, np.array([1 - 1j, 2.0, 1 + 1j]))
        assert table.value(-1) == 1 - 1j
        assert table.value(0) == 2.0
        assert table[1] == 1 + 1j
        with pytest.raises(IndexError):
            table.value(2)

    def test_truncated_keeps_center(self):
        table = symmetric_table(5, seed=0)
        sub = table.truncated(2)
        assert sub.q_max == 2
        np.testing.assert_array_equal(sub.values, table.values[3:8])

    def test_truncated_rejects_widening(self):
        with pytest.raises(IndexError):
            symmetric_table(3, seed=1).truncated(4)

    def test_reflected_conjugate_involution(self):
        table = symmetric_table(4, seed=2)
        twice = table.reflected_conjugate().reflected_conjugate()
        np.testing.assert_array_equal(twice.values, table.values)

    def test_symmetry_defect_zero_for_symmetric(self):
        assert symmetric_table(6, seed=3).conjugate_symmetry_defect() == 0.0

    def test_arithmetic_requires_equal_bands(self):
        with pytest.raises(ValueError):
            symmetric_table(2, seed=4) + symmetric_table(3, seed=4)

    def test_values_are_read_only(self):
        table = symmetric_table(2, seed=5)
        with pytest.raises(ValueError):
            table.values[0] = 0.0


class TestObservedIncrements:
    def test_rejects_times_outside_window(self):
        with pytest.raises(ValueError):
            ObservedIncrements(np.array([-4.0, 0.0]), np.array([1.0, 1.0]))

    def test_rejects_non_increasing_times(self):
        with pytest.raises(ValueError):
            ObservedIncrements(np.array([0.0, 0.0]), np.array([1.0, 1.0]))

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            ObservedIncrements(np.array([]), np.array([]))


class TestIncrementCoefficients:
    def test_two_increment_frozen_value(self):
        # increments (1, 2) at times (0, pi/2): c(1) = (1 - 2j) / 2pi
        obs = ObservedIncrements(np.array([0.0, np.pi / 2]), np.array([1.0, 2.0]))
        table = increment_coefficients(obs, 1)
        assert table.value(1) == pytest.approx(
            0.15915494309189535 - 0.3183098861837907j, abs=1e-15
        )

    def test_center_is_total_increment(self):
        obs = ObservedIncrements(
            np.array([-3.0, -1.0, 0.5, 2.0]), np.array([0.3, -0.7, 1.1, 0.2])
        )
        table = increment_coefficients(obs, 4)
        assert table.value(0) == pytest.approx(0.9 / TWO_PI, rel=1e-14)
        assert table.value(0).imag == 0.0

    def test_matches_direct_double_loop(self):
        rng = np.random.default_rng(11)
        times = np.sort(rng.uniform(-np.pi, np.pi, size=40))
        incr = rng.normal(size=40)
        obs = ObservedIncrements(times, incr)
        table = increment_coefficients(obs, 12)
        expected = direct_spectrum(times, incr, 12)
        np.testing.assert_allclose(table.values, expected, rtol=0, atol=1e-12)

    def test_fft_path_matches_direct_on_canonical_grid(self):
        m = 64
        times = -np.pi + TWO_PI * np.arange(m) / m
        rng = np.random.default_rng(12)
        incr = rng.normal(size=m)
        obs = ObservedIncrements(times, incr)
        # band wider than the grid exercises the wrap-around aliasing
        table = increment_coefficients(obs, 2 * m + 5)
        expected = direct_spectrum(times, incr, 2 * m + 5)
        np.testing.assert_allclose(table.values, expected, rtol=0, atol=1e-12)

    def test_conjugate_symmetry_is_exact(self):
        rng = np.random.default_rng(13)
        times = np.sort(rng.uniform(-np.pi, np.pi, size=100))
        obs = ObservedIncrements(times, rng.normal(size=100))
        assert increment_coefficients(obs, 30).conjugate_symmetry_defect() == 0.0

    @given(scale=st.floats(0.1, 10.0), shift=st.floats(-5.0, 5.0))
    @settings(max_examples=25, deadline=None)
    def test_linearity_in_increments(self, scale, shift):
        times = np.array([-2.0, -0.5, 1.0])
        base = np.array([0.4, -1.2, 0.8])
        other = np.array([1.0, 0.1, -0.3])
        left = increment_coefficients(
            ObservedIncrements(times, scale * base + shift * other), 5
        )
        a = increment_coefficients(ObservedIncrements(times, base), 5)
        b = increment_coefficients(ObservedIncrements(times, other), 5)
        np.testing.assert_allclose(
            left.values, scale * a.values + shift * b.values, rtol=0, atol=1e-12
        )


class TestFunctionCoefficients:
    def test_constant_function_concentrates_at_zero(self):
        times = np.linspace(-np.pi, np.pi, 257)[:-1]
        table = function_coefficients(times, np.full(256, 3.0), 5)
        assert table.value(0).real == pytest.approx(3.0, rel=1e-12)
        off = np.abs(np.delete(table.values, 5))
        assert off.max() < 1e-12

    def test_left_riemann_error_halves_with_grid(self):
        # phi(t) = t has exact coefficient i(-1)^q / q; the left-endpoint
        # sum converges at first order, so doubling m should ~halve the error
        exact = 1j * (-1) ** 1 / 1
        errors = []
        for m in (256, 512, 1024):
            times = np.linspace(-np.pi, np.pi, m + 1)[:-1]
            table = function_coefficients(times, times.copy(), 1)
            errors.append(abs(table.value(1) - exact))
        assert errors[1] < 0.6 * errors[0]
        assert errors[2] < 0.6 * errors[1]

    def test_final_cell_extends_to_right_endpoint(self):
        # single sample at -pi covers the whole window
        table = function_coefficients(np.array([-np.pi]), np.array([2.0]), 0)
        assert table.value(0) == pytest.approx(2.0, rel=1e-15)

    def test_sample_at_pi_carries_no_mass(self):
        base = function_coefficients(np.array([0.0]), np.array([1.5]), 3)
        padded = function_coefficients(
            np.array([0.0, np.pi]), np.array([1.5, 99.0]), 3
        )
        np.testing.assert_allclose(padded.values, base.values, rtol=0, atol=1e-15)

    def test_rejects_empty_input(self):
        with pytest.raises(ValueError):
            function_coefficients(np.array([]), np.array([]), 2)


class TestJumpCoefficients:
    def test_frozen_two_jump_value(self):
        # sizes (0.8, 0.6) at times (0, pi/2): c(2) = (0.64 - 0.36) / 2pi
        table = jump_coefficients(
            np.array([0.0, np.pi / 2]), np.array([0.8, 0.6]), 2
        )
        assert table.value(2) == pytest.approx(0.04456338406573072, abs=1e-15)

    def test_empty_record_gives_zero_table(self):
        table = jump_coefficients(np.array([]), np.array([]), 4)
        np.testing.assert_array_equal(table.values, np.zeros(9, dtype=complex))

    def test_center_is_quadratic_sum(self):
        sizes = np.array([0.5, -1.5, 2.0])
        table = jump_coefficients(np.array([-1.0, 0.0, 1.0]), sizes, 3)
        assert table.value(0) == pytest.approx((sizes**2).sum() / TWO_PI, rel=1e-14)
        assert table.value(0).imag == 0.0


class TestBohrPartial:
    def test_single_increment_frozen_value(self):
        # one increment of 1.3: the q=0 partial sum collapses to a^2/4pi^2
        obs = ObservedIncrements(np.array([0.4]), np.array([1.3]))
        table = increment_coefficients(obs, 3)
        value = bohr_partial(table, table, 0, 3)
        assert value == pytest.approx(0.042808200088887714 + 0j, abs=1e-16)

    def test_matches_explicit_average(self):
        u = symmetric_table(8, seed=20)
        v = symmetric_table(12, seed=21)
        cutoff, q = 6, 3
        expected = sum(
            u.value(l) * v.value(q - l) for l in range(-cutoff, cutoff + 1)
        ) / (2 * cutoff + 1)
        assert bohr_partial(u, v, q, cutoff) == pytest.approx(expected, rel=1e-13)

    def test_band_requirements(self):
        u = symmetric_table(4, seed=22)
        v = symmetric_table(6, seed=23)
        with pytest.raises(IndexError):
            bohr_partial(u, v, 0, 5)  # u too narrow
        with pytest.raises(IndexError):
            bohr_partial(u, v, 3, 4)  # v needs cutoff + |q| = 7

    @given(q=st.integers(-3, 3))
    @settings(max_examples=20, deadline=None)
    def test_conjugate_symmetry_under_negation(self, q):
        obs = ObservedIncrements(
            np.array([-1.5, 0.2, 1.8]), np.array([0.7, -0.4, 1.1])
        )
        table = increment_coefficients(obs, 8)
        plus = bohr_partial(table, table, q, 5)
        minus = bohr_partial(table, table, -q, 5)
        assert minus == pytest.approx(np.conj(plus), abs=1e-14)


class TestFejerPolynomial:
    def test_reproduces_weighted_band(self):
        # zero-padded band: the evaluation is exactly the finite weighted sum
        table = symmetric_table(2, seed=30)
        padded_values = np.zeros(11, dtype=complex)
        padded_values[3:8] = table.values
        padded = CoefficientTable(5, padded_values)
        t = 0.9
        expected = sum(
            (1 - abs(l) / 5) * padded.value(l) * np.exp(1j * l * t)
            for l in range(-5, 6)
        ).real
        assert fejer_polynomial(padded, 5, t) == pytest.approx(expected, rel=1e-12)

    def test_scalar_in_scalar_out(self):
        table = symmetric_table(4, seed=31)
        value = fejer_polynomial(table, 3, 0.5)
        assert isinstance(value, float)
        arr = fejer_polynomial(table, 3, np.array([0.5, 1.0]))
        assert arr.shape == (2,)
        # matmul blocking may differ between 1-point and 2-point evaluation
        assert arr[0] == pytest.approx(value, rel=1e-14)

    def test_rejects_degree_beyond_band(self):
        with pytest.raises(ValueError, match="degree"):
            fejer_polynomial(symmetric_table(3, seed=32), 4, 0.0)

    def test_rejects_asymmetric_table(self):
        values = np.zeros(5, dtype=complex)
        values[4] = 1.0  # no matching conjugate at -2
        with pytest.raises(ValueError, match="symmetr"):
            fejer_polynomial(CoefficientTable(2, values), 2, 0.0)

    def test_degree_one_returns_center(self):
        table = symmetric_table(3, seed=33)
        assert fejer_polynomial(table, 1, 1.2) == pytest.approx(
            table.value(0).real, rel=1e-14
        )

    def test_converges_on_smooth_target(self):
        # coefficients of f(t) = 2 + cos t: c(0)=2, c(+-1)=1/2
        errors = []
        for degree in (8, 64, 512):
            values = np.zeros(2 * degree + 1, dtype=complex)
            values[degree] = 2.0
            values[degree - 1] = values[degree + 1] = 0.5
            table = CoefficientTable(degree, values)
            grid = np.linspace(-np.pi, np.pi, 101)
            recon = fejer_polynomial(table, degree, grid)
            errors.append(np.abs(recon - (2 + np.cos(grid))).max())
        assert errors[0] > errors[1] > errors[2]
        assert errors[2] < 0.01


class TestCsvRoundTrip:
    def test_exact_round_trip(self, tmp_path):
        table = symmetric_table(7, seed=40)
        dest = tmp_path / "coeffs.csv"
        write_coefficients_csv(table, dest)
        back = read_coefficients_csv(dest)
        assert back.q_max == 7
        np.testing.assert_array_equal(back.values, table.values)

    def test_header_and_order(self, tmp_path):
        table = symmetric_table(1, seed=41)
        dest = tmp_path / "coeffs.csv"
        write_coefficients_csv(table, dest)
        lines = dest.read_text().splitlines()
        assert lines[0] == "q,re,im"
        assert [row.split(",")[0] for row in lines[1:]] == ["-1", "0", "1"]

    def test_rejects_gap_in_indices(self, tmp_path):
        dest = tmp_path / "bad.csv"
        dest.write_text("q,re,im\n-1,0.0,0.0\n1,1.0,0.0\n")
        with pytest.raises(ValueError, match="line"):
            read_coefficients_csv(dest)
