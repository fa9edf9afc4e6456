"""Potential, forces, and saddle normal modes."""

import numpy as np
import pytest

from tunnex.model import (
    ModelParams,
    force_2d,
    force_jacobian_2d,
    hamiltonian_2d,
    modes_to_coords,
    potential_2d,
    project_to_modes,
    sphaleron_modes,
)


@pytest.fixture
def params():
    return ModelParams()


class TestPotential:
    def test_saddle_height_is_one(self, params):
        assert potential_2d(0.0, 0.0, params) == pytest.approx(1.0, abs=1e-15)

    def test_decays_along_antidiagonal(self, params):
        v_far = potential_2d(10.0, -2.0, params)
        assert abs(v_far - 0.5 * params.omega**2 * 4.0) < 1e-12

    def test_force_is_minus_gradient(self, params):
        rng = np.random.default_rng(7)
        h = 1e-6
        for _ in range(5):
            x, y = rng.uniform(-2, 2, size=2)
            fx, fy = force_2d(x, y, params)
            gx = (potential_2d(x + h, y, params)
                  - potential_2d(x - h, y, params)) / (2 * h)
            gy = (potential_2d(x, y + h, params)
                  - potential_2d(x, y - h, params)) / (2 * h)
            assert fx == pytest.approx(-gx, abs=1e-8)
            assert fy == pytest.approx(-gy, abs=1e-8)

    def test_force_jacobian_matches_fd(self, params):
        x, y = 0.4, -0.3
        dfx_dx, dfx_dy, dfy_dx, dfy_dy = force_jacobian_2d(x, y, params)
        h = 1e-6
        fd = np.empty((2, 2))
        fd[:, 0] = (np.array(force_2d(x + h, y, params)).real
                    - np.array(force_2d(x - h, y, params)).real) / (2 * h)
        fd[:, 1] = (np.array(force_2d(x, y + h, params)).real
                    - np.array(force_2d(x, y - h, params)).real) / (2 * h)
        got = np.array([[dfx_dx, dfx_dy], [dfy_dx, dfy_dy]]).real
        assert np.allclose(got, fd, atol=1e-7)

    def test_complex_rotation_scales_barrier(self):
        p0 = ModelParams()
        p1 = ModelParams(epsilon=0.05)
        v0 = potential_2d(0.0, 0.0, p0)
        v1 = potential_2d(0.0, 0.0, p1)
        assert v1 == pytest.approx(v0 * np.exp(-0.05j), abs=1e-15)

    def test_energy_conserved_form(self, params):
        e = hamiltonian_2d(0.3, -0.1, 0.5, 0.2, params)
        expected = (0.5 * 0.5**2 + 0.5 * 0.2**2
                    + potential_2d(0.3, -0.1, params))
        assert e == pytest.approx(expected, abs=1e-14)


class TestSphaleronModes:
    def test_eigenvalue_identities(self):
        """Characteristic identities: product -omega^2, sum omega^2 - 2."""
        omega = 0.5
        modes = sphaleron_modes(omega)
        lam_p, lam_m = modes.omega_plus_sq, -modes.omega_minus_sq
        assert lam_p * lam_m == pytest.approx(-omega**2, abs=1e-12)
        assert lam_p + lam_m == pytest.approx(omega**2 - 2.0, abs=1e-12)

    def test_closed_form(self):
        omega = 0.5
        modes = sphaleron_modes(omega)
        disc = np.sqrt(1.0 + omega**4 / 4.0)
        base = -1.0 + omega**2 / 2.0
        assert modes.omega_plus_sq == pytest.approx(base + disc, abs=1e-12)
        assert -modes.omega_minus_sq == pytest.approx(base - disc, abs=1e-12)

    def test_one_stable_one_unstable(self):
        modes = sphaleron_modes(0.5)
        assert modes.omega_plus_sq > 0
        assert modes.omega_minus_sq > 0

    def test_projection_roundtrip(self):
        modes = sphaleron_modes(0.5)
        x, y = 0.12, -0.07
        cp, cm = project_to_modes(x, y, modes)
        x2, y2 = modes_to_coords(cp, cm, modes)
        assert x2 == pytest.approx(x, abs=1e-13)
        assert y2 == pytest.approx(y, abs=1e-13)


class TestParams:
    def test_rejects_negative_epsilon(self):
        with pytest.raises(ValueError):
            ModelParams(epsilon=-0.01)

    def test_rejects_nonpositive_omega(self):
        with pytest.raises(ValueError):
            ModelParams(omega=0.0)

    def test_with_epsilon_copies(self):
        p = ModelParams()
        q = p.with_epsilon(0.02)
        assert q.epsilon == 0.02 and p.epsilon == 0.0
        assert q.omega == p.omega
