"""Tests for projections, the transform, reconstruction and Parseval."""

import numpy as np
import pytest
from scipy.integrate import quad, simpson
from scipy.interpolate import CubicSpline

from weylspec.boundstates import discrete_spectrum
from weylspec.errors import NumericalError
from weylspec.green import WEYL, kodaira_pairing
from weylspec.grids import gaussian, zero_like
from weylspec.spectral import (
    BumpWindow,
    parseval_check,
    project,
    projection_kernel,
    projection_tail,
    reconstruct,
    time_average_check,
    transform,
    weyl_pairing,
)


def sine_transform(h, k):
    return simpson(np.sin(k * h.x) * h.y, x=h.x)


class TestWeylPairing:
    def test_free_matches_sine_transform(self, free, bump):
        rep = weyl_pairing(free, 1.0, 4.0, bump, bump)
        oracle, _ = quad(lambda k: 2.0 / np.pi * sine_transform(bump, k) ** 2, 1.0, 2.0,
                         epsabs=1e-13, epsrel=1e-12, limit=200)
        assert rep.method == WEYL
        assert rep.converged
        assert rep.value == pytest.approx(oracle, rel=1e-6)
        assert rep.imag_part == pytest.approx(0.0, abs=1e-14)

    def test_additive_in_the_interval(self, well, bump):
        whole = weyl_pairing(well, 0.5, 9.0, bump, bump)
        left = weyl_pairing(well, 0.5, 3.0, bump, bump)
        right = weyl_pairing(well, 3.0, 9.0, bump, bump)
        assert left.value + right.value == pytest.approx(whole.value, rel=1e-6)

    @pytest.mark.parametrize("name", ["free", "well"])
    def test_kodaira_gap_is_linear_in_epsilon(self, name, bump, request):
        pot = request.getfixturevalue(name)
        weyl = weyl_pairing(pot, 1.0, 4.0, bump, bump).value
        gaps = [abs(kodaira_pairing(pot, 1.0, 4.0, eps, bump, bump).value - weyl) / abs(weyl)
                for eps in (1e-1, 1e-2, 1e-3)]
        ratios = [b / a for a, b in zip(gaps, gaps[1:])]
        assert all(0.02 < r < 0.35 for r in ratios), ratios
        assert gaps[-1] <= 1e-2

    def test_zero_data(self, free, bump):
        assert weyl_pairing(free, 1.0, 4.0, bump, zero_like(bump)).value == 0.0

    def test_window_below_threshold(self, free, bump):
        with pytest.raises(ValueError):
            weyl_pairing(free, 1e-5, 4.0, bump, bump)
        with pytest.raises(ValueError):
            weyl_pairing(free, 4.0, 1.0, bump, bump)


class TestProjection:
    def test_free_kernel_closed_form(self, free):
        x, y = 1.3, 2.1

        def primitive(k):
            return (np.sin((x - y) * k) / (x - y) - np.sin((x + y) * k) / (x + y)) / np.pi

        expected = primitive(2.0) - primitive(1.0)
        assert projection_kernel(free, 1.0, 4.0, x, y) == pytest.approx(expected, rel=1e-7, abs=1e-9)

    def test_kernel_symmetric(self, exp_metric):
        a = projection_kernel(exp_metric, 0.5, 2.0, 0.4, 3.0)
        b = projection_kernel(exp_metric, 0.5, 2.0, 3.0, 0.4)
        assert a == pytest.approx(b, rel=1e-10)

    def test_kernel_negative_point(self, free):
        with pytest.raises(ValueError):
            projection_kernel(free, 1.0, 4.0, -0.1, 1.0)

    def test_project_pairs_like_weyl(self, well, bump):
        ph = project(well, 0.5, 4.0, bump, bump.x)
        direct = simpson(bump.y * np.real(ph.y), x=bump.x)
        assert direct == pytest.approx(weyl_pairing(well, 0.5, 4.0, bump, bump).value, rel=1e-5)

    def test_project_zero(self, free, bump):
        out = project(free, 1.0, 4.0, zero_like(bump), [1.0, 2.0, 3.0])
        assert not np.any(out.y)

    def test_tail_matches_far_field(self, free):
        data = gaussian(2.0, 0.5, dx=0.01)
        near, far = 100.0, 300.0
        x = np.linspace(near, far, 10001)
        f = np.real(project(free, 1.0, 4.0, data, x, quad_tol=1e-10).y)
        d = CubicSpline(x, f)(x, 1)
        norm_sq = simpson(f * f, x=x)
        # ∫ -f'' f = ∫ f'^2 - [f f']
        energy = simpson(d * d, x=x) - (f[-1] * d[-1] - f[0] * d[0])
        t_near = projection_tail(free, 1.0, 4.0, data, near)
        t_far = projection_tail(free, 1.0, 4.0, data, far)
        assert t_near.norm_sq - t_far.norm_sq == pytest.approx(norm_sq, rel=1e-2)
        assert t_near.energy - t_far.energy == pytest.approx(energy, rel=1e-2)
        assert 1.0 < t_near.energy / t_near.norm_sq < 4.0

    def test_tail_needs_free_region(self, well, bump):
        with pytest.raises(ValueError):
            projection_tail(well, 1.0, 4.0, bump, 3.0)
        assert projection_tail(well, 1.0, 4.0, zero_like(bump), 10.0).norm_sq == 0.0


class TestTransform:
    def test_free_coefficients(self, free, bump):
        lambdas = [4.0, 1.0, 9.0]
        res = transform(free, bump, lambdas, bound_states=[])
        np.testing.assert_array_equal(res.lambdas, [1.0, 4.0, 9.0])
        expected = [sine_transform(bump, k) / k for k in (1.0, 2.0, 3.0)]
        np.testing.assert_allclose(res.coefficients, expected, rtol=1e-10, atol=1e-14)
        np.testing.assert_allclose(res.density, np.array([1.0, 2.0, 3.0]) / np.pi, rtol=1e-10)
        assert len(res.bound_eigenvalues) == 0
        assert set(res.table()) == {"lambda", "re_coefficient", "im_coefficient", "density", "c_abs_sq"}

    def test_bound_coefficients(self, well, bump):
        states = discrete_spectrum(well)
        res = transform(well, bump, [1.0], bound_states=states)
        assert len(res.bound_coefficients) == len(states) == 2
        assert res.metadata["bound_states"] == 2


class TestReconstruct:
    def test_free(self, free, bump):
        x = np.linspace(2.0, 8.0, 61)
        rec = reconstruct(free, bump, x, bound_states=[])
        assert rec.deviation < 1e-3
        assert rec.bound_states == 0
        assert not np.any(rec.discrete_part)
        assert rec.to_dict()["points"] == 61

    def test_zero(self, free, bump):
        rec = reconstruct(free, zero_like(bump), [1.0, 2.0, 3.0])
        assert rec.deviation == 0.0

    def test_bad_window(self, free, bump):
        with pytest.raises(ValueError):
            reconstruct(free, bump, lambda_max=1e-4)

    def test_free_threshold_share(self, free, bump):
        rec = reconstruct(free, bump, [5.0], bound_states=[])
        assert rec.threshold_correction > 0.0
        assert rec.tail_estimate <= 1e-4
        assert rec.lambda_max > 60.0

    def test_capped_well(self, well, bump):
        x = np.linspace(1.0, 9.0, 81)
        rec = reconstruct(well, bump, x, bound_states=discrete_spectrum(well))
        assert rec.bound_states == 2
        assert rec.tail_estimate <= 1e-4
        assert rec.deviation <= 1e-3
        without = reconstruct(well, bump, x, include_bound_states=False)
        assert without.deviation > 10.0 * rec.deviation

    def test_tail_above_cap(self, well, bump):
        with pytest.raises(NumericalError) as info:
            reconstruct(well, bump, [5.0], bound_states=[], lambda_max=4.0, lambda_cap=6.0,
                        tail_tol=1e-8)
        assert info.value.location == 6.0
        with pytest.raises(ValueError):
            reconstruct(well, bump, [5.0], bound_states=[], lambda_max=10.0, lambda_cap=5.0)


class TestParseval:
    def test_free(self, free, bump):
        rep = parseval_check(free, bump, bound_states=[])
        assert rep.defect <= 1e-3
        assert rep.discrete == 0.0

    def test_capped_well(self, well, bump):
        states = discrete_spectrum(well)
        rep = parseval_check(well, bump, bound_states=states)
        assert rep.defect <= 1e-3
        assert 0 < rep.bound_share < 1

    def test_zero(self, free, bump):
        assert parseval_check(free, zero_like(bump), bound_states=[]).defect == 0.0


class TestTimeAverage:
    def test_window(self):
        phi = BumpWindow(1.0, 3.0)
        assert phi(2.0) == pytest.approx(np.exp(-1.0))
        assert phi(0.5) == 0.0
        assert phi(3.0) == 0.0
        np.testing.assert_array_equal(phi(np.array([0.0, 4.0])), [0.0, 0.0])
        with pytest.raises(ValueError):
            BumpWindow(2.0, 2.0)

    def test_free_translates(self, free):
        data = gaussian(40.0, 1.0, dx=0.01)
        rep = time_average_check(free, BumpWindow(1.0, 4.0), data, data, t_grid=[10.0, 30.0])
        assert rep.lhs > 0
        assert rep.defects[-1] <= 1e-3 * rep.lhs
        assert len(rep.to_dict()["rhs"]) == 2

    def test_capped_well_defect_decreases(self, well, bump):
        rep = time_average_check(well, BumpWindow(1.0, 4.0), bump, bump, t_grid=[10.0, 30.0, 100.0])
        assert rep.non_increasing
        assert not rep.flagged
        assert np.all(rep.defects <= 1e-3)
        assert rep.defects[-1] < rep.defects[0]

    def test_window_below_threshold(self, free, bump):
        rep = time_average_check(free, BumpWindow(-2.0, -1.0), bump, bump, t_grid=[10.0])
        assert rep.lhs == 0.0
        assert not rep.flagged
