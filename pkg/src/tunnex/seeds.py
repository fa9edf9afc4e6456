"""Seed trajectories for the contour solver.

The natural entry point to the two-coordinate branch web is the family of
real periodic orbits in the inverted potential ("bounce" orbits): at
theta = eps = 0 the saddle trajectory is real Euclidean motion on the
vertical contour segment, with turning points at both corners, continued by
real Minkowski evolution along the horizontal segments.  Such a seed
satisfies every boundary condition exactly, so the full Newton solve
converges in a couple of iterations, after which (T, theta, eps) can be
walked anywhere on the branch.

The orbit family is grown by continuation in amplitude with the period as
an unknown: a fixed-period Newton solve tends to collapse onto the trivial
(point-like) saddle solution, while the amplitude-pinned formulation keeps
the orbit finite and returns the period as output.  A secant iteration on
the amplitude then lands on the requested period.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline

from .contour import Contour
from .errors import MinimizationFailed, SingularJacobian
from .model import ModelParams, force_2d, force_jacobian_2d, potential_2d, sphaleron_modes
from .types import Trajectory

__all__ = ["euclidean_orbit", "periodic_instanton_seed", "sphaleron_period"]


def sphaleron_period(params: ModelParams) -> float:
    """Period 2 pi / w_minus of small oscillations around the saddle point."""
    modes = sphaleron_modes(params.omega)
    return 2.0 * np.pi / np.sqrt(modes.omega_minus_sq)


def _orbit_residual(q: np.ndarray, T: float, A: float, vec: np.ndarray,
                    params: ModelParams) -> np.ndarray:
    """Equations for a half-period orbit of q'' = +grad U at pinned amplitude.

    q has shape (m, 2) on a uniform grid over [0, T/2]; rows are the interior
    second differences, second-order one-sided Neumann conditions at both
    ends, and the amplitude pin vec . q(0) = A.
    """
    m = q.shape[0]
    h = (T / 2.0) / (m - 1)
    X, y = q[:, 0], q[:, 1]
    fX, fy = force_2d(X, y, params)
    gX, gy = -fX.real, -fy.real
    r = np.empty(2 * m + 1)
    body = r[: 2 * m].reshape(m, 2)
    body[1:-1, 0] = X[2:] - 2 * X[1:-1] + X[:-2] - h * h * gX[1:-1]
    body[1:-1, 1] = y[2:] - 2 * y[1:-1] + y[:-2] - h * h * gy[1:-1]
    body[0, 0] = -3 * X[0] + 4 * X[1] - X[2]
    body[0, 1] = -3 * y[0] + 4 * y[1] - y[2]
    body[-1, 0] = 3 * X[-1] - 4 * X[-2] + X[-3]
    body[-1, 1] = 3 * y[-1] - 4 * y[-2] + y[-3]
    r[-1] = vec @ q[0] - A
    return r


def _orbit_jacobian(q: np.ndarray, T: float, A: float, vec: np.ndarray,
                    params: ModelParams) -> sp.csc_matrix:
    """Exact Jacobian of :func:`_orbit_residual` w.r.t. (q, T)."""
    m = q.shape[0]
    h = (T / 2.0) / (m - 1)
    X, y = q[:, 0], q[:, 1]
    gxx, gxy, gyx, gyy = [g.real for g in force_jacobian_2d(X, y, params)]
    fX, fy = force_2d(X, y, params)
    gX, gy = -fX.real, -fy.real

    rows, cols, vals = [], [], []

    def add(r, c, v):
        r, c, v = np.broadcast_arrays(
            np.atleast_1d(r), np.atleast_1d(c), np.atleast_1d(np.asarray(v, dtype=float))
        )
        rows.append(r)
        cols.append(c)
        vals.append(v)

    K = np.arange(1, m - 1)
    one = np.ones(len(K))
    # grad U = -force, and d(-h^2 g)/dq = +h^2 * (force jacobian)
    add(2 * K, 2 * (K - 1), one)
    add(2 * K, 2 * (K + 1), one)
    add(2 * K, 2 * K, -2 * one + h * h * gxx[K])
    add(2 * K, 2 * K + 1, h * h * gxy[K])
    add(2 * K + 1, 2 * (K - 1) + 1, one)
    add(2 * K + 1, 2 * (K + 1) + 1, one)
    add(2 * K + 1, 2 * K + 1, -2 * one + h * h * gyy[K])
    add(2 * K + 1, 2 * K, h * h * gyx[K])
    # dependence on T via h: d(-h^2 g)/dT = -2 h g * dh/dT
    dh_dT = 0.5 / (m - 1)
    add(2 * K, 2 * m, -2.0 * h * dh_dT * gX[K])
    add(2 * K + 1, 2 * m, -2.0 * h * dh_dT * gy[K])
    # Neumann rows
    for row, base in ((0, 0), (1, 1)):
        add(row, base, -3.0)
        add(row, base + 2, 4.0)
        add(row, base + 4, -1.0)
    last = 2 * (m - 1)
    for row in (last, last + 1):
        add(row, row, 3.0)
        add(row, row - 2, -4.0)
        add(row, row - 4, 1.0)
    # amplitude pin row
    add(2 * m, 0, vec[0])
    add(2 * m, 1, vec[1])

    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    vals = np.concatenate(vals)
    n = 2 * m + 1
    return sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsc()


def _orbit_newton(q0: np.ndarray, T0: float, A: float, vec: np.ndarray,
                  params: ModelParams, tol: float = 1e-12,
                  max_iters: int = 60):
    q, T = q0.copy(), T0
    r = _orbit_residual(q, T, A, vec, params)
    norm = np.linalg.norm(r, np.inf)
    for _ in range(max_iters):
        if norm < tol:
            return q, T
        J = _orbit_jacobian(q, T, A, vec, params)
        try:
            step = spla.splu(J).solve(-r)
        except RuntimeError as exc:
            raise SingularJacobian(str(exc)) from exc
        lam = 1.0
        for _ in range(12):
            q_try = q + lam * step[:-1].reshape(q.shape)
            T_try = T + lam * step[-1]
            if T_try <= 0:
                lam *= 0.5
                continue
            r_try = _orbit_residual(q_try, T_try, A, vec, params)
            n_try = np.linalg.norm(r_try, np.inf)
            if n_try < norm or n_try < tol:
                q, T, r, norm = q_try, T_try, r_try, n_try
                break
            lam *= 0.5
        else:
            raise MinimizationFailed(f"orbit solve stalled at |r|={norm:.2e}")
    if norm < tol:
        return q, T
    raise MinimizationFailed(f"orbit solve did not converge: |r|={norm:.2e}")


def euclidean_orbit(T: float, params: ModelParams, m: int = 1401,
                    a_step: float = 0.15, a_max: float = 15.0):
    """Half-period bounce orbit in the inverted potential at period T.

    Returns ``(spline, energy)`` where the cubic spline maps
    sigma in [0, T/2] to (X, y); sigma = 0 is the turning point with the
    larger X (the end that escapes forward under real-time evolution).

    The orbit family is built by amplitude continuation from the
    small-oscillation regime, then a secant iteration on the amplitude
    matches the requested period.

    Raises
    ------
    MinimizationFailed
        If T is at or below the small-oscillation period (only the trivial
        orbit exists) or the amplitude continuation runs out of range.
    """
    T_sph = sphaleron_period(params)
    if T <= T_sph * (1.0 + 1e-9):
        raise MinimizationFailed(
            f"no finite-amplitude orbit at T={T:.4f} <= T_sph={T_sph:.4f}"
        )
    modes = sphaleron_modes(params.omega)
    vec = np.array([np.sin(modes.alpha), np.cos(modes.alpha)])
    if vec[0] < 0:
        vec = -vec  # orient the pinned end towards positive X

    def solve_at(A, q_guess, T_guess):
        return _orbit_newton(q_guess, T_guess, A, vec, params)

    # continuation in amplitude until the period brackets the target
    A = 0.1
    sigma_frac = np.linspace(0.0, 1.0, m)
    q = A * np.outer(np.cos(np.pi * sigma_frac), vec)
    q, T_cur = solve_at(A, q, T_sph * 1.001)
    hist = [(A, T_cur, q)]
    while T_cur < T and A < a_max:
        A += a_step
        q, T_cur = solve_at(A, q, T_cur)
        hist.append((A, T_cur, q))
    if T_cur < T:
        raise MinimizationFailed(f"period {T:.3f} not reached by amplitude {a_max}")

    # secant on the amplitude to land on the requested period
    (a0, t0, _), (a1, t1, q) = hist[-2], hist[-1]
    for _ in range(60):
        if abs(t1 - T) < 1e-12:
            break
        a2 = a1 + (T - t1) * (a1 - a0) / (t1 - t0)
        q, t2 = solve_at(a2, q, t1)
        a0, t0, a1, t1 = a1, t1, a2, t2
    else:
        raise MinimizationFailed("secant on orbit amplitude did not converge")

    # final polish at exactly the requested period cannot change T, so make
    # sure the achieved one is close enough for the contour corners
    if abs(t1 - T) > 1e-9:
        raise MinimizationFailed(f"orbit period mismatch {abs(t1 - T):.2e}")

    if q[0, 0] < q[-1, 0]:
        q = q[::-1]
    sigma = np.linspace(0.0, T / 2.0, m)
    energy = float(potential_2d(q[0, 0], q[0, 1], params).real)
    return CubicSpline(sigma, q), energy


def _real_evolution(q0, qdot0, t_end: float, params: ModelParams):
    """Real Minkowski evolution q'' = -grad U from given data, dense output."""
    def rhs(t, z):
        X, y, vx, vy = z
        fX, fy = force_2d(X, y, params)
        return [vx, vy, fX.real, fy.real]

    sol = solve_ivp(rhs, (0.0, t_end), [q0[0], q0[1], qdot0[0], qdot0[1]],
                    method="DOP853", rtol=1e-11, atol=1e-12, dense_output=True)
    if not sol.success:
        raise MinimizationFailed(f"real-time extension failed: {sol.message}")
    return sol


def periodic_instanton_seed(T: float, contour: Contour, params: ModelParams,
                            m: int = 1401) -> Trajectory:
    """Real bounce-orbit seed sampled on the contour (theta = eps = 0).

    The Euclidean orbit fills the vertical segment (sigma = Im t); real
    evolution from the sigma = 0 turning point fills the final segment and
    from the sigma = T/2 turning point (backwards) the initial segment.
    """
    if abs(contour.T - T) > 1e-9:
        raise ValueError("contour height does not match requested period")
    orbit, _ = euclidean_orbit(T, params, m=m)

    X = np.empty(contour.n_nodes, dtype=complex)
    y = np.empty(contour.n_nodes, dtype=complex)

    # vertical segment: t = i sigma, sigma from T/2 (corner B) to 0 (corner C)
    sl_bc = slice(contour.i_b, contour.i_c + 1)
    sigma = contour.nodes[sl_bc].imag
    q_bc = orbit(sigma)
    X[sl_bc] = q_bc[:, 0]
    y[sl_bc] = q_bc[:, 1]

    # final segment: forward evolution from the sigma = 0 turning point
    sl_cd = slice(contour.i_c, contour.n_nodes)
    t_cd = contour.nodes[sl_cd].real
    fwd = _real_evolution(orbit(0.0), np.zeros(2), contour.t_right, params)
    z = fwd.sol(t_cd)
    X[sl_cd] = z[0]
    y[sl_cd] = z[1]

    # initial segment: backward evolution from the sigma = T/2 turning point
    sl_ab = slice(0, contour.i_b + 1)
    t_ab = contour.nodes[sl_ab].real  # negative, corner B at 0
    bwd = _real_evolution(orbit(T / 2.0), np.zeros(2), contour.t_left, params)
    z = bwd.sol(t_ab)
    X[sl_ab] = z[0]
    y[sl_ab] = z[1]

    return Trajectory(X=X, y=y)
