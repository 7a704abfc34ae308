"""Tests for negative eigenvalues and the zero-energy threshold."""

import numpy as np
import pytest
from scipy.integrate import simpson
from scipy.optimize import brentq

from weylspec.boundstates import (
    admissible_z_range,
    discrete_spectrum,
    find_bound_states,
    jost_like,
    m_scan,
    zero_energy_report,
)
from weylspec.coeffs import DecayClass, Potential
from weylspec.errors import PotentialError


def square_well_roots():
    """z with K cot(5K) = -z, K^2 + z^2 = 1 (depth 1, width 5, sharp edges)."""

    def f(z):
        K = np.sqrt(1.0 - z * z)
        return K * np.cos(5 * K) + z * np.sin(5 * K)

    z = np.linspace(1e-3, 1 - 1e-9, 4000)
    v = f(z)
    cells = np.nonzero(np.sign(v[:-1]) * np.sign(v[1:]) < 0)[0]
    return sorted(brentq(f, z[i], z[i + 1]) for i in cells)


@pytest.fixture(scope="module")
def well_states(well):
    return discrete_spectrum(well)


class TestJostLike:
    def test_free_is_one(self, free):
        for z in (0.1, 1.0, 3.0):
            assert jost_like(free, z) == pytest.approx(1.0, abs=1e-12)

    def test_rejects_nonpositive(self, free):
        with pytest.raises(ValueError):
            jost_like(free, 0.0)

    def test_exponential_window(self, exp_decay):
        with pytest.raises(PotentialError):
            jost_like(exp_decay, 0.6)

    def test_power_integrable(self):
        pot = Potential(
            p=lambda x: np.ones_like(np.asarray(x, dtype=float)),
            p_prime=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
            q=lambda x: -1.0 / (1.0 + np.asarray(x, dtype=float)) ** 2,
            decay_class=DecayClass.power_integrable(),
            tail_majorant=lambda x: 1.0 / np.asarray(x, dtype=float) ** 2,
            tail_integral=lambda x: 1.0 / np.maximum(np.asarray(x, dtype=float), 1e-300),
        )
        with pytest.raises(PotentialError):
            jost_like(pot, 0.5)
        assert discrete_spectrum(pot) == []
        with pytest.raises(PotentialError):
            zero_energy_report(pot)

    def test_scan_order(self, well):
        scan = m_scan(well, [0.9, 0.1, 0.5], threads=2)
        np.testing.assert_array_equal(scan.z, [0.9, 0.1, 0.5])
        assert scan.m[1] == pytest.approx(jost_like(well, 0.1), rel=1e-12)


class TestCappedWell:
    def test_count(self, well_states):
        assert len(well_states) == 2

    def test_matches_square_well(self, well_states):
        oracle = [-z * z for z in reversed(square_well_roots())]
        assert len(oracle) == 2
        found = [st.eigenvalue for st in well_states]
        np.testing.assert_allclose(found, sorted(oracle), atol=1e-3)

    def test_below_threshold_and_above_depth(self, well_states):
        for st in well_states:
            assert -1.0 <= st.eigenvalue < 0.0
            assert st.residual <= 1e-8

    def test_normalized(self, well_states):
        for st in well_states:
            assert st.norm_check == pytest.approx(1.0, abs=1e-6)

    def test_orthogonal(self, well_states):
        x = np.linspace(0.0, 60.0, 12001)
        f0, f1 = (st.evaluate(x) for st in well_states)
        assert abs(simpson(f0 * f1, x=x)) <= 1e-6

    def test_decay_rate(self, well_states):
        for st in well_states:
            assert st.decay_rate == pytest.approx(st.z, rel=1e-3)

    def test_eigenfunction_equation(self, well, well_states):
        st = well_states[0]
        x = np.linspace(0.5, 4.5, 9)
        v = st.evaluate(x)
        h = 1e-3
        d2 = (st.evaluate(x + h) - 2 * v + st.evaluate(x - h)) / h ** 2
        np.testing.assert_allclose(-d2 + well.q(x) * v, st.eigenvalue * v, atol=1e-3)

    def test_to_dict(self, well_states):
        assert set(well_states[0].to_dict()) == {
            "eigenvalue", "z", "residual", "norm_check", "decay_rate", "double_root_suspected"}

    def test_explicit_range(self, well):
        states = find_bound_states(well, (0.5, 0.99), n_scan=32)
        assert len(states) == 1
        assert states[0].z > 0.5


class TestSearchWindow:
    def test_free_has_none(self, free):
        assert admissible_z_range(free, 0.01) is None
        assert discrete_spectrum(free) == []

    def test_exponential_window(self, exp_decay):
        lo, hi = admissible_z_range(exp_decay, 0.01)
        assert lo == 0.01
        assert hi == pytest.approx(0.499)

    def test_depth_bound(self, well):
        lo, hi = admissible_z_range(well, 0.01)
        assert 1.0 < hi < 1.01

    def test_bad_arguments(self, well):
        with pytest.raises(ValueError):
            find_bound_states(well, (0.5, 0.1))
        with pytest.raises(ValueError):
            find_bound_states(well, (0.1, 0.5), n_scan=8)


class TestZeroEnergy:
    def test_free(self, free):
        rep = zero_energy_report(free)
        assert rep.a == pytest.approx(1.0)
        assert rep.b == pytest.approx(0.0, abs=1e-10)
        assert rep.not_square_integrable
        assert not rep.resonance

    def test_capped_well(self, well):
        rep = zero_energy_report(well)
        assert rep.not_square_integrable
        assert rep.fit_residual < 1e-8
        assert rep.fit_interval[0] == pytest.approx(7.05)
