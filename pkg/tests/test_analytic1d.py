"""Closed-form relations of the 1D sech^2 barrier model."""

import numpy as np
import pytest

from tunnex.analytic1d import (
    BranchLabel,
    branch_points,
    branch_points_regularized,
    exact_T_of_E,
    exact_solution_1d,
    fig6_branches,
    imag_t0,
    potential_1d,
    sphaleron_family_solution,
    trajectory_on_path,
    wkb_exponent,
)


class TestTofE:
    def test_forbidden_region_closed_form(self):
        for e_val in (0.3, 0.5, 0.7):
            assert exact_T_of_E(e_val) == pytest.approx(
                2.0 * np.pi / np.sqrt(2.0 * e_val), rel=1e-14)

    def test_monotone_decreasing_in_E(self):
        grid = np.linspace(0.2, 0.95, 12)
        t_vals = [exact_T_of_E(e) for e in grid]
        assert all(a > b for a, b in zip(t_vals, t_vals[1:]))

    def test_regularized_step_midpoint(self):
        """At E = 1 (eps > 0) the phase angle sits at -pi/2: T = pi/sqrt(2E)."""
        eps = 0.01
        t_mid = exact_T_of_E(1.0, eps)
        assert t_mid == pytest.approx(
            (2.0 / np.sqrt(2.0)) * (np.pi + np.angle(np.exp(-1j * eps) - 1.0)),
            rel=1e-14)

    def test_collapses_above_barrier(self):
        assert exact_T_of_E(1.3, 0.01) < 0.1

    def test_rejects_bad_args(self):
        with pytest.raises(ValueError):
            exact_T_of_E(0.0)
        with pytest.raises(ValueError):
            exact_T_of_E(0.5, -0.1)


class TestWkb:
    def test_zero_at_barrier_top(self):
        assert wkb_exponent(1.0) == 0.0

    def test_closed_form_value(self):
        """2 sqrt(2) pi (1 - sqrt(E)) for the sech^2 barrier."""
        for e_val in (0.3, 0.5, 0.7):
            expected = 2.0 * np.sqrt(2.0) * np.pi * (1.0 - np.sqrt(e_val))
            assert wkb_exponent(e_val) == pytest.approx(expected, rel=1e-10)

    def test_monotone_decreasing(self):
        grid = np.linspace(0.1, 0.9, 9)
        f_vals = [wkb_exponent(e) for e in grid]
        assert all(a > b for a, b in zip(f_vals, f_vals[1:]))


class TestExactSolution:
    def test_satisfies_equation_of_motion(self):
        e_val, eps = 0.5, 0.0
        t0 = 1j * imag_t0(e_val, eps)
        times = np.linspace(-8.0, -2.0, 4000) + 1j * exact_T_of_E(e_val) / 2.0
        x_vals = trajectory_on_path(e_val, eps, times, t0)
        h = (times[1] - times[0]).real
        acc = (x_vals[2:] - 2.0 * x_vals[1:-1] + x_vals[:-2]) / h**2
        force = 2.0 * np.sinh(x_vals[1:-1]) / np.cosh(x_vals[1:-1]) ** 3
        assert np.max(np.abs(acc - force)) < 1e-5

    def test_real_on_shifted_segment(self):
        """With Im t0 chosen right, X is real on the incoming segment."""
        e_val = 0.5
        t0 = 1j * imag_t0(e_val)
        times = np.linspace(-12.0, -6.0, 50) + 1j * exact_T_of_E(e_val) / 2.0
        x_vals = trajectory_on_path(e_val, 0.0, times, t0)
        assert np.max(np.abs(x_vals.imag)) < 1e-10

    def test_energy_conserved(self):
        e_val = 0.5
        t0 = 1j * imag_t0(e_val)
        times = np.linspace(-9.0, -3.0, 400) + 1j * exact_T_of_E(e_val) / 2.0
        x_vals = trajectory_on_path(e_val, 0.0, times, t0)
        h = (times[1] - times[0]).real
        v = (x_vals[2:] - x_vals[:-2]) / (2.0 * h)
        energy = 0.5 * v**2 + potential_1d(x_vals[1:-1])
        assert np.max(np.abs(energy - e_val)) < 1e-5

    def test_branch_point_rejected(self):
        e_val = 0.5
        t_minus, _ = branch_points(e_val)
        with pytest.raises(ValueError):
            exact_solution_1d(e_val, 0.0, t_minus, 0.0)


class TestBranchPoints:
    def test_regularized_limits_to_sharp(self):
        e_val = 0.6
        sharp = branch_points(e_val)
        reg = branch_points_regularized(e_val, 1e-9)
        assert abs(sharp[0] - reg[0]) < 1e-6
        assert abs(sharp[1] - reg[1]) < 1e-6

    def test_symmetric_about_imaginary_axis(self):
        t_minus, t_plus = branch_points(0.4)
        assert t_minus.real == pytest.approx(-t_plus.real, abs=1e-13)
        assert t_minus.imag == pytest.approx(t_plus.imag, abs=1e-13)


class TestSphaleronFamily:
    def test_approaches_barrier_top(self):
        x_late = sphaleron_family_solution(30.0, 2.0)
        assert abs(x_late) < 1e-12

    def test_real_at_half_height(self):
        t = np.linspace(0.0, 5.0, 20) + 1j * 1.0
        x_vals = sphaleron_family_solution(t, 2.0)
        assert np.max(np.abs(x_vals.imag)) < 1e-12


class TestFig6Branches:
    def test_five_labels_present(self):
        labels = {b.label for b in fig6_branches()}
        assert labels == set(BranchLabel)

    def test_tunneling_branch_matches_relation(self):
        for b in fig6_branches():
            if b.label is BranchLabel.TUNNELING_FORBIDDEN:
                assert b.T_half == pytest.approx(
                    exact_T_of_E(b.E) / 2.0, rel=1e-12)
