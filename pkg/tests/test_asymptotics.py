"""Tests for the scattering amplitude and spectral density."""

import numpy as np
import pytest

from weylspec.asymptotics import (
    asymptotic_pairing_defect,
    c_function,
    comparison_wave,
    density_sweep,
    k_tail,
    s_infinity,
    s_profile,
    spectral_density,
    truncation_point,
    window_bound_sq,
)
from weylspec.errors import NumericalError
from weylspec.grids import gaussian


class TestWindowBound:
    def test_endpoint_maximum(self):
        assert window_bound_sq((0.5, 2.0)) == pytest.approx(2.5)
        assert window_bound_sq((1.0, 1.0)) == pytest.approx(2.0)
        assert window_bound_sq((0.1, 3.0)) == pytest.approx(10.1)

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            window_bound_sq((0.0, 1.0))
        with pytest.raises(ValueError):
            window_bound_sq((2.0, 1.0))


class TestKTail:
    def test_free_is_zero(self, free):
        assert k_tail(free, (0.5, 4.0), 0.0) == 0.0

    def test_exp_decay_closed_form(self, exp_decay):
        assert k_tail(exp_decay, (1.0, 1.0), 0.0) == pytest.approx(1.0, rel=1e-10)
        assert k_tail(exp_decay, (1.0, 1.0), 3.0) == pytest.approx(np.exp(-3.0), rel=1e-12)

    def test_negative_x(self, free):
        with pytest.raises(ValueError):
            k_tail(free, (1.0, 2.0), -1.0)

    def test_truncation_point(self, well, exp_decay):
        assert truncation_point(well, 4.0, 1e-10) == pytest.approx(5.05)
        x = truncation_point(exp_decay, 4.0, 1e-10)
        assert k_tail(exp_decay, (4.0, 4.0), x) <= 1e-10

    def test_truncation_point_cap(self, exp_decay):
        with pytest.raises(NumericalError):
            truncation_point(exp_decay, 4.0, 1e-10, x_cap=5.0)


class TestFreeCase:
    @pytest.mark.parametrize("lam", [0.01, 0.5, 4.0, 25.0])
    def test_closed_form(self, free, lam):
        point = c_function(free, lam)
        assert point.a == pytest.approx(0.0, abs=1e-14)
        assert point.b == pytest.approx(1.0)
        assert abs(point.c - (-0.5j / np.sqrt(lam))) <= 1e-8 / np.sqrt(lam)
        assert point.density == pytest.approx(np.sqrt(lam) / np.pi, rel=1e-8)
        assert point.truncation_error_bound == 0.0

    def test_comparison_wave_is_sine(self, free):
        point = c_function(free, 2.25)
        x = np.linspace(0.0, 10.0, 101)
        np.testing.assert_allclose(comparison_wave(point, x), np.sin(1.5 * x) / 1.5, atol=1e-12)

    def test_below_threshold(self, free):
        with pytest.raises(ValueError):
            c_function(free, 1e-4)
        with pytest.raises(ValueError):
            c_function(free, -1.0, lambda_min=0.0)


class TestPerturbed:
    @pytest.mark.parametrize("lam", [0.3, 2.0, 10.0])
    def test_density_positive(self, well, exp_metric, lam):
        assert spectral_density(well, lam) > 0
        assert spectral_density(exp_metric, lam) > 0

    def test_limit_unpacks(self, exp_decay):
        a, b, err = s_infinity(exp_decay, 4.0)
        assert np.hypot(a, b) > 0
        assert 0 < err < 1e-8

    def test_truncation_certificate(self, exp_decay):
        lim = s_infinity(exp_decay, 4.0)
        prof = s_profile(exp_decay, 4.0, [lim.x_max, 2.0 * lim.x_max])
        drift = np.linalg.norm(prof[1] - prof[0])
        assert drift <= lim.err + 1e4 * 1e-10 * max(1.0, np.linalg.norm(prof[0]))

    def test_eventually_constant_is_exact(self, well):
        prof = s_profile(well, 3.0, [5.05, 8.0, 30.0])
        np.testing.assert_allclose(prof[1], prof[0], atol=1e-12)
        np.testing.assert_allclose(prof[2], prof[0], atol=1e-12)

    def test_sweep_sorted(self, well):
        points = density_sweep(well, [9.0, 1.0, 4.0], threads=2)
        assert [pt.lam for pt in points] == [1.0, 4.0, 9.0]
        assert points[1].density == pytest.approx(spectral_density(well, 4.0), rel=1e-12)

    def test_row(self, well):
        row = c_function(well, 1.0).to_row()
        assert set(row) == {"lambda", "a", "b", "re_c", "im_c", "c_abs_sq", "density", "err_bound"}


class TestPairingDefect:
    def test_within_bound(self, exp_decay):
        h = gaussian(5.0, 0.5, dx=0.01)
        res = asymptotic_pairing_defect(exp_decay, 4.0, h, [0.0, 5.0, 15.0])
        assert np.all(res.defects <= res.bounds + 1e-8)
        assert res.bounds[-1] < res.bounds[0]
