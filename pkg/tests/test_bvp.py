"""Saddle-point boundary value solver: 1D oracle checks and 2D basics."""

import numpy as np
import pytest

from tunnex.analytic1d import exact_T_of_E, imag_t0, trajectory_on_path, wkb_exponent
from tunnex.bvp import (
    classify_topology,
    newton_solve,
    newton_solve_1d,
    rebuild_contour,
    reinterpolate,
    walk,
    walk_to,
)
from tunnex.contour import build_contour
from tunnex.model import ModelParams
from tunnex.pipelines import instanton_start
from tunnex.types import Topology, Trajectory


def solve_1d(E, eps=0.0, n=256, tol=1e-10):
    """Solve the 1D problem at the analytic T(E), seeded exactly."""
    T = exact_T_of_E(E, eps)
    contour = build_contour(T=T, t_left=-18.0, t_right=14.0,
                            n_ab=n, n_bc=max(16, n // 8), n_cd=n)
    t0 = 1j * imag_t0(E, eps)
    x_seed = trajectory_on_path(E, eps, contour.nodes, t0)
    guess = Trajectory(X=x_seed, y=None)
    return newton_solve_1d(guess, contour, T, eps=eps, tol=tol)


@pytest.fixture(scope="module")
def sol_half():
    return solve_1d(0.5)


class TestSolver1D:
    def test_converges_fast_from_exact_seed(self, sol_half):
        assert sol_half.newton_iters <= 3
        assert sol_half.residual_norm < 1e-10

    def test_recovers_energy(self, sol_half):
        assert sol_half.E == pytest.approx(0.5, abs=5e-4)

    def test_suppression_matches_wkb(self, sol_half):
        assert sol_half.F == pytest.approx(wkb_exponent(0.5), rel=2e-3)

    def test_incoming_momentum_real(self, sol_half):
        assert abs(sol_half.traj.p0.imag) < 1e-5

    def test_grid_refinement_is_second_order(self):
        f_ref = wkb_exponent(0.5)
        err_n = abs(solve_1d(0.5, n=256).F - f_ref)
        err_2n = abs(solve_1d(0.5, n=512).F - f_ref)
        assert err_2n < err_n / 3.0

    def test_regularized_problem_solves(self):
        sol = solve_1d(0.9, eps=0.01)
        assert sol.residual_norm < 1e-10
        assert sol.E == pytest.approx(0.9, abs=2e-3)


class TestContourRebuild:
    def test_rebuild_keeps_resolution(self):
        c = build_contour(T=4.0, t_left=-10.0, t_right=8.0,
                          n_ab=128, n_bc=32, n_cd=128)
        c2 = rebuild_contour(c, 5.0)
        assert c2.T == 5.0
        assert c2.n_ab == c.n_ab and c2.n_cd == c.n_cd
        # BC spacing preserved: node count scales with T.
        assert c2.n_bc == pytest.approx(32 * 5.0 / 4.0, abs=1)

    def test_reinterpolate_identity(self):
        c = build_contour(T=4.0, t_left=-10.0, t_right=8.0,
                          n_ab=128, n_bc=32, n_cd=128)
        x = np.sin(0.3 * c.nodes)
        traj = Trajectory(X=x, y=np.cos(0.2 * c.nodes))
        back = reinterpolate(traj, c, c)
        assert np.max(np.abs(back.X - x)) < 1e-10
        assert np.max(np.abs(back.y - traj.y)) < 1e-10

    def test_reinterpolate_onto_taller_contour(self):
        c = build_contour(T=4.0, t_left=-10.0, t_right=8.0,
                          n_ab=128, n_bc=32, n_cd=128)
        c2 = rebuild_contour(c, 4.4)
        x = np.exp(0.1 * c.nodes)
        traj = Trajectory(X=x, y=None)
        moved = reinterpolate(traj, c, c2)
        assert len(moved.X) == c2.n_nodes
        # Endpoint values (same physical t) are preserved.
        assert moved.X[-1] == pytest.approx(x[-1], abs=1e-8)


@pytest.fixture(scope="module")
def pi_solution():
    return instanton_start(5.6, ModelParams(),
                           t_left=-16.0, t_right=12.0,
                           n_ab=280, n_cd=240, h_bc=0.06)


class TestSolver2D:
    def test_instanton_converges(self, pi_solution):
        assert pi_solution.residual_norm < 1e-10
        assert pi_solution.theta == 0.0
        assert pi_solution.topology is Topology.TRANSMISSION

    def test_observables_in_expected_window(self, pi_solution):
        # Coarse-grid instanton at T = 5.6; fine-grid values are
        # E = 0.6302, N = 0.5638 (resolution-limited tolerance).
        assert pi_solution.E == pytest.approx(0.6302, abs=5e-3)
        assert pi_solution.N == pytest.approx(0.5638, abs=5e-3)

    def test_theta_walk_moves_observables(self, pi_solution):
        path = walk(pi_solution, ModelParams(), dtheta=0.05, n_steps=2)
        e_vals = [s.E for s in path.solutions]
        n_vals = [s.N for s in path.solutions]
        assert e_vals[0] > e_vals[-1]
        assert n_vals[0] > n_vals[-1]
        assert path.last.theta == pytest.approx(0.1, abs=1e-12)

    def test_walk_to_absolute_target(self, pi_solution):
        sol = walk_to(pi_solution, ModelParams(), theta=0.04, max_step=0.02)
        assert sol.theta == pytest.approx(0.04, abs=1e-12)
        assert sol.residual_norm < 1e-7

    def test_classify_transmission(self, pi_solution):
        topo = classify_topology(pi_solution.traj, pi_solution.contour,
                                 ModelParams())
        assert topo is Topology.TRANSMISSION
