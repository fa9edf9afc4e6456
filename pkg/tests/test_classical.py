"""Real-time shooting: outcomes, conservation, boundary energy."""

import numpy as np
import pytest

from tunnex.classical import (
    Outcome,
    ShotSpec,
    find_E0,
    shoot,
    tint_phase_scan,
)
from tunnex.errors import BracketError
from tunnex.model import ModelParams


@pytest.fixture
def params():
    return ModelParams()


class TestShoot:
    def test_high_energy_transmits(self, params):
        res = shoot(ShotSpec(E=3.0, N=0.0, phi=0.0), params)
        assert res.outcome is Outcome.TRANSMITTED
        assert res.x_end >= 8.0 - 1e-9

    def test_low_energy_reflects(self, params):
        res = shoot(ShotSpec(E=0.3, N=0.0, phi=0.0), params)
        assert res.outcome is Outcome.REFLECTED
        assert res.x_max < 0.0

    def test_energy_conserved(self, params):
        res = shoot(ShotSpec(E=1.5, N=0.4, phi=1.0), params)
        assert res.energy_drift < 1e-8

    def test_interaction_time_positive_and_finite(self, params):
        res = shoot(ShotSpec(E=3.0, N=0.0, phi=0.0), params)
        assert 0.0 < res.T_int < 10.0

    def test_launch_below_channel_rejected(self, params):
        with pytest.raises(ValueError):
            shoot(ShotSpec(E=0.2, N=1.0, phi=0.0), params)

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            ShotSpec(E=1.0, N=0.0, phi=0.0, x_start=-3.0)
        with pytest.raises(ValueError):
            ShotSpec(E=-1.0, N=0.0, phi=0.0)

    def test_low_energy_turns_around_early(self, params):
        res = shoot(ShotSpec(E=0.05, N=0.0, phi=0.0, t_max=400.0), params)
        assert res.outcome is Outcome.REFLECTED
        assert res.x_max < -2.0


class TestFindE0:
    def test_zero_excitation_boundary_exceeds_barrier_height(self, params):
        """A quiet oscillator still gets kicked by the barrier, draining
        longitudinal energy: the classical boundary sits well above E_S."""
        e0 = find_E0(0.0, params, tol=5e-3, n_phi=8)
        assert e0 > 1.2

    def test_boundary_never_below_sphaleron_energy(self, params):
        e0 = find_E0(1.0, params, tol=5e-3, n_phi=16)
        assert e0 >= 1.0 - 5e-3

    def test_resonant_excitation_lowers_boundary(self, params):
        """A suitably phased oscillator can push the particle over: the
        boundary drops toward E_S as N grows from zero."""
        e0_quiet = find_E0(0.0, params, tol=5e-3, n_phi=8)
        e0_kicked = find_E0(1.0, params, tol=5e-3, n_phi=16)
        assert e0_kicked < e0_quiet - 0.5


class TestPhaseScan:
    def test_unique_minimum_above_boundary(self, params):
        phis, tints, phi_star, t_min = tint_phase_scan(
            1.6, 0.4, params, n_phi=24, t_max=120.0)
        finite = np.isfinite(tints)
        assert finite.any()
        assert t_min <= np.nanmin(tints) + 1e-9
        assert 0.0 <= phi_star < 2.0 * np.pi

    def test_no_transmission_raises(self, params):
        with pytest.raises(BracketError):
            tint_phase_scan(0.3, 0.1, params, n_phi=8, t_max=60.0)
