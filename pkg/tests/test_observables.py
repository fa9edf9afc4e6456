"""Derived quantities and duality checks on solved saddles."""

import numpy as np
import pytest

from tunnex.analytic1d import exact_T_of_E, imag_t0, trajectory_on_path
from tunnex.bvp import newton_solve_1d, walk
from tunnex.contour import build_contour
from tunnex.model import ModelParams
from tunnex.observables import (
    EpsFamily,
    eps_derivative_check,
    extrapolate_eps,
    legendre_check,
    occupation_number,
)
from tunnex.pipelines import instanton_start
from tunnex.types import BranchPath, Trajectory


def solve_1d(E, T=None, eps=0.0, n=256):
    if T is None:
        T = exact_T_of_E(E, eps)
    contour = build_contour(T=T, t_left=-18.0, t_right=14.0,
                            n_ab=n, n_bc=max(16, n // 8), n_cd=n)
    t0 = 1j * imag_t0(E, eps)
    x_seed = trajectory_on_path(E, eps, contour.nodes, t0)
    return newton_solve_1d(Trajectory(X=x_seed, y=None), contour, T, eps=eps)


class TestOccupation:
    def test_real_for_conjugate_pair(self):
        u = 0.3 + 0.4j
        v = np.conj(u)
        n_occ = occupation_number(u, v)
        assert abs(np.imag(n_occ)) < 1e-15
        assert np.real(n_occ) == pytest.approx(abs(u) ** 2, abs=1e-15)

    def test_theta_scaling(self):
        u = 0.5 + 0.1j
        theta = 0.3
        v = np.exp(theta) * np.conj(u)
        n_occ = occupation_number(u, v)
        assert np.real(n_occ) == pytest.approx(
            np.exp(theta) * abs(u) ** 2, rel=1e-12)


@pytest.fixture(scope="module")
def params():
    return ModelParams()


@pytest.fixture(scope="module")
def center(params):
    return instanton_start(5.6, params, t_left=-16.0, t_right=12.0,
                           n_ab=280, n_cd=240, h_bc=0.06)


class TestLegendre2D:
    def test_dF_dE_is_minus_T(self, center, params):
        h = 0.02
        back_T = walk(center, params, dT=-h, n_steps=1).last
        fwd_T = walk(center, params, dT=+h, n_steps=1).last
        path_T = BranchPath([back_T, center, fwd_T])
        back_h = walk(center, params, dtheta=-h, n_steps=1).last
        fwd_h = walk(center, params, dtheta=+h, n_steps=1).last
        path_theta = BranchPath([back_h, center, fwd_h])
        res = legendre_check(path_T, path_theta)
        assert res["err_T"] < 0.01
        assert res["err_theta"] < 0.01
        assert res["dF_dE"] == pytest.approx(-center.T, rel=0.01)
        assert res["dF_dN"] == pytest.approx(-center.theta, abs=0.01)

    def test_eps_derivative_is_twice_interaction_time(self, center, params):
        h = 5e-4
        up = walk(center, params, deps=h, n_steps=1).last
        up2 = walk(up, params, deps=h, n_steps=1).last
        path = BranchPath([center, up, up2])
        res = eps_derivative_check(path)
        assert res["err"] < 0.02


class TestLegendre1D:
    def test_dF_dE_matches_minus_T(self):
        e0 = 0.5
        t0 = exact_T_of_E(e0)
        h = 0.03
        sols = [solve_1d(e0, T=t0 + d) for d in (-h, 0.0, h)]
        f_vals = np.array([s.F for s in sols])
        e_vals = np.array([s.E for s in sols])
        slope = (f_vals[2] - f_vals[0]) / (e_vals[2] - e_vals[0])
        assert slope == pytest.approx(-t0, rel=0.01)


class TestEpsExtrapolation:
    def test_linear_family_recovers_intercept(self):
        class Stub:
            def __init__(self, eps, E, N, F):
                self.eps, self.E, self.N, self.F = eps, E, N, F

        eps_vals = [0.004, 0.008, 0.012]
        fam = EpsFamily([Stub(e, 1.0 + 2.0 * e, 0.5 - e, 3.0 * e)
                         for e in eps_vals])
        out = extrapolate_eps(fam)
        assert out["E"] == pytest.approx(1.0, abs=1e-12)
        assert out["N"] == pytest.approx(0.5, abs=1e-12)
        assert out["F"] == pytest.approx(0.0, abs=1e-12)
        assert out["F_err"] < 1e-10

    def test_requires_enough_members(self):
        class Stub:
            eps, E, N, F = 0.01, 1.0, 0.5, 0.1

        with pytest.raises(ValueError):
            extrapolate_eps(EpsFamily([Stub()]), degree=1)
