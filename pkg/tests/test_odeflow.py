"""Tests for the first-order flow and eigenfunction construction."""

import numpy as np
import pytest

from weylspec.errors import NumericalError
from weylspec.odeflow import (
    DECAYING_AT_INFINITY,
    REGULAR_AT_0,
    decaying_eigenfunction,
    decaying_root,
    exp_xC,
    regular_eigenfunction,
    solve_system,
    wronskian,
)


class TestExpXC:
    @pytest.mark.parametrize("lam", [4.0, -2.5, 0.0, 1.0 + 2.0j, 1e-12])
    def test_inverse(self, lam):
        x = np.linspace(0.0, 3.0, 7)
        prod = exp_xC(lam, x) @ exp_xC(lam, -x)
        np.testing.assert_allclose(prod, np.broadcast_to(np.eye(2), prod.shape), atol=1e-12)

    def test_zero_lambda(self):
        m = exp_xC(0.0, 2.0)
        np.testing.assert_array_equal(m, [[1.0, 2.0], [0.0, 1.0]])

    def test_positive_lambda(self):
        k = 2.0
        m = exp_xC(k * k, 0.7)
        assert m[0, 0] == pytest.approx(np.cos(k * 0.7))
        assert m[0, 1] == pytest.approx(np.sin(k * 0.7) / k)
        assert m[1, 0] == pytest.approx(-k * np.sin(k * 0.7))

    def test_real_for_real_lambda(self):
        assert exp_xC(-3.0, np.array([1.0, 2.0])).dtype == float
        assert exp_xC(1.0 + 1.0j, 1.0).dtype == complex


class TestSolveSystem:
    def test_free_flow_matches_closed_form(self, free):
        u0 = np.array([0.3, -1.2])
        traj = solve_system(free, 2.0, u0, 0.0, 6.0, tol=1e-10)
        expected = exp_xC(2.0, 6.0) @ u0
        np.testing.assert_allclose(traj.states[-1], expected, atol=1e-7)

    def test_backward_integration(self, free):
        u0 = np.array([1.0, 0.0])
        traj = solve_system(free, -1.0, u0, 4.0, 0.0, tol=1e-10)
        expected = exp_xC(-1.0, -4.0) @ u0
        np.testing.assert_allclose(traj.states[-1], expected, rtol=1e-7)

    def test_real_arithmetic(self, well):
        traj = solve_system(well, 1.5, [0.0, 1.0], 0.0, 3.0)
        assert traj.states.dtype == float

    def test_residual_small(self, exp_metric):
        traj = solve_system(exp_metric, 3.0, [0.0, 1.5], 0.0, 5.0, tol=1e-10)
        assert traj.residual(exp_metric) < 1e-5

    def test_bad_arguments(self, free):
        with pytest.raises(ValueError):
            solve_system(free, 1.0, [0.0, 1.0], 0.0, 1.0, tol=0.0)
        with pytest.raises(ValueError):
            solve_system(free, 1.0, [0.0, 1.0], 2.0, 2.0)


class TestEigenfunctions:
    def test_free_regular_is_sine(self, free):
        lam = 2.25
        x = np.linspace(0.0, 20.0, 201)
        ef = regular_eigenfunction(free, lam, x)
        assert ef.orientation == REGULAR_AT_0
        np.testing.assert_allclose(ef.value, np.sin(1.5 * x) / 1.5, atol=1e-12)
        np.testing.assert_allclose(ef.quasi_derivative, np.cos(1.5 * x), atol=1e-12)

    def test_regular_boundary_values(self, exp_metric):
        ef = regular_eigenfunction(exp_metric, 2.0, [0.0, 1.0], tol=1e-10)
        assert ef.value[0] == pytest.approx(0.0, abs=1e-14)
        assert ef.quasi_derivative[0] == pytest.approx(exp_metric.p(0.0))

    def test_free_decaying_is_exponential(self, free):
        nu = -1.0 + 0.5j
        k = decaying_root(nu)
        assert k.imag > 0
        x = np.linspace(0.0, 4.0, 41)
        ef = decaying_eigenfunction(free, nu, x, x_max=10.0)
        assert ef.orientation == DECAYING_AT_INFINITY
        np.testing.assert_allclose(ef.value, np.exp(1j * k * x), rtol=1e-9)

    def test_decaying_tail_quasi_derivative(self, exp_metric):
        nu = -1.0 + 0.25j
        k = decaying_root(nu)
        x_seed = exp_metric.effective_support(1e-3)
        x = np.linspace(x_seed + 0.5, x_seed + 5.0, 10)
        ef = decaying_eigenfunction(exp_metric, nu, np.concatenate([[1.0], x]), x_max=30.0, tol=1e-3)
        p = exp_metric.p(x)
        assert np.all(p > 1.0)
        np.testing.assert_allclose(ef.quasi_derivative[1:], 1j * k * p * ef.value[1:], rtol=1e-12)

    def test_decaying_rejects_positive_real(self, free):
        with pytest.raises(ValueError):
            decaying_eigenfunction(free, 4.0, [1.0], x_max=10.0)

    def test_decaying_short_x_max(self, exp_decay):
        with pytest.raises(NumericalError):
            decaying_eigenfunction(exp_decay, -1.0, [0.0, 1.0], x_max=1.0, tol=1e-10)

    def test_negative_grid(self, free):
        with pytest.raises(ValueError):
            regular_eigenfunction(free, 1.0, [-1.0, 0.0])

    def test_state_outside_range(self, free):
        ef = decaying_eigenfunction(free, -1.0, [2.0, 3.0], x_max=10.0)
        with pytest.raises(ValueError):
            ef.state(1.0)


class TestWronskian:
    def test_free_at_minus_one(self, free):
        x = np.linspace(0.0, 5.0, 11)
        f = regular_eigenfunction(free, -1.0, x)
        g = decaying_eigenfunction(free, -1.0, x, x_max=10.0)
        np.testing.assert_allclose(wronskian(free, f, g, x), 1.0, atol=1e-10)

    def test_constant_for_capped_well(self, well):
        nu = 0.5 + 1.0j
        x = np.linspace(0.0, 8.0, 17)
        f = regular_eigenfunction(well, nu, x, tol=1e-10)
        g = decaying_eigenfunction(well, nu, x, x_max=10.0, tol=1e-10)
        w = wronskian(well, f, g, x)
        assert np.max(np.abs(w - w[0])) <= 1e-7 * abs(w[0])

    def test_needs_common_lambda(self, free):
        f = regular_eigenfunction(free, -1.0, [1.0])
        g = decaying_eigenfunction(free, -2.0, [1.0], x_max=10.0)
        with pytest.raises(ValueError):
            wronskian(free, f, g, 1.0)
