"""Coupled-channel transmission: quadrature, unitarity, exact limits."""

import numpy as np
import pytest

from tunnex.errors import ClosedChannelOnly
from tunnex.qoracle import ChannelBasis, coupling_matrix, f_exact, transmission


class Sech2Basis:
    """Single decoupled channel with the exactly solvable sech^2 barrier."""

    n_channels = 1
    lam = 0.5  # only sets the default box size

    def thresholds(self):
        return np.array([0.0])

    def potential(self, x):
        v = 1.0 / np.cosh(np.asarray(x)) ** 2
        return v[:, None, None]


def sech2_exact_transmission(E, v0=1.0, a=1.0):
    """Closed-form transmission through V = v0 / cosh^2(a x) (unit mass)."""
    k = np.sqrt(2.0 * E)
    s = np.sinh(np.pi * k / a) ** 2
    c = np.cosh(0.5 * np.pi * np.sqrt(8.0 * v0 / a**2 - 1.0)) ** 2
    return s / (s + c)


class TestCouplingMatrix:
    def test_diagonal_closed_form_at_origin(self):
        """Gaussian-Gaussian overlap: V_00(0) = (1/lam)(1 + lam/(2 omega))^(-1/2)."""
        lam, omega = 0.1, 0.5
        basis = ChannelBasis(n_channels=4, omega=omega, lam=lam)
        v0 = coupling_matrix(0.0, basis)
        expected = (1.0 / lam) / np.sqrt(1.0 + lam / (2.0 * omega))
        assert v0[0, 0] == pytest.approx(expected, rel=1e-10)

    def test_symmetric(self):
        basis = ChannelBasis(n_channels=8, omega=0.5, lam=0.15)
        v = coupling_matrix(np.array([0.7]), basis)[0]
        assert np.max(np.abs(v - v.T)) < 1e-14

    def test_decays_at_infinity(self):
        basis = ChannelBasis(n_channels=6, omega=0.5, lam=0.2)
        v = coupling_matrix(np.array([80.0, -80.0]), basis)
        assert np.max(np.abs(v)) < 1e-14

    def test_validation(self):
        with pytest.raises(ValueError):
            ChannelBasis(n_channels=0, omega=0.5, lam=0.1)
        with pytest.raises(ValueError):
            ChannelBasis(n_channels=4, omega=-1.0, lam=0.1)


class TestTransmission:
    def test_flux_unitarity(self):
        t_tot, res = transmission(4.0, 0, ChannelBasis(10, 0.5, 0.2))
        assert res.unitarity_defect < 1e-8

    def test_truncated_channel_unoccupied(self):
        _, res = transmission(4.0, 0, ChannelBasis(12, 0.5, 0.2))
        assert res.top_occupation < 1e-8

    def test_channel_truncation_stable(self):
        """Once converged, four more channels move T by < 1e-6 (virtual
        closed-channel paths need ~E/omega extra channels to saturate)."""
        t_a, _ = transmission(4.0, 0, ChannelBasis(20, 0.5, 0.2))
        t_b, _ = transmission(4.0, 0, ChannelBasis(24, 0.5, 0.2))
        assert abs(t_a - t_b) < 1e-6

    def test_monotone_in_energy(self):
        basis = ChannelBasis(10, 0.5, 0.2)
        t_vals = [transmission(e, 0, basis)[0] for e in (3.0, 4.0, 5.0, 6.0)]
        assert all(a < b for a, b in zip(t_vals, t_vals[1:]))

    def test_closed_incoming_channel_rejected(self):
        with pytest.raises(ClosedChannelOnly):
            transmission(2.0, 5, ChannelBasis(10, 0.5, 0.2))

    def test_decoupled_sech2_matches_closed_form(self):
        e_val = 1.3
        t_got, _ = transmission(e_val, 0, Sech2Basis(), L=18.0,
                                pts_per_wavelength=96, richardson=True)
        assert t_got == pytest.approx(sech2_exact_transmission(e_val),
                                      abs=1e-8)

    def test_grid_halving_stability(self):
        """With Richardson elimination of the O(h^2) term, halving the grid
        spacing moves ln T by < 1e-4."""
        basis = ChannelBasis(10, 0.5, 0.2)
        t_a, _ = transmission(4.0, 0, basis, pts_per_wavelength=24, richardson=True)
        t_b, _ = transmission(4.0, 0, basis, pts_per_wavelength=48, richardson=True)
        assert abs(np.log(t_a) - np.log(t_b)) < 1e-4


class TestFExact:
    def test_deep_forbidden_point_extrapolates(self):
        f0, diag = f_exact(0.8, 0.1)
        assert 1.5 < f0 < 2.5
        # F_lam decreases monotonically toward the lam -> 0 limit here.
        assert np.all(np.diff(diag["F_values"]) < 0)

    def test_allowed_point_unsuppressed(self):
        f0, _ = f_exact(2.5, 0.1, lambdas=(0.2, 0.15, 0.1))
        assert abs(f0) < 0.05

    def test_exact_ladder_matches_excitation(self):
        _, diag = f_exact(0.86, 0.43, exact_ladder=True)
        n_resc = diag["lambdas"] * (diag["N_values"] + 0.5)
        assert np.max(np.abs(n_resc - 0.43)) < 1e-12
