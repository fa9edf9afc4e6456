"""Newton solver for the complexified boundary value problem on the contour.

The saddle trajectory obeys the complexified equations of motion

    X'' = F_X(X, y),      y'' = F_y(X, y)

along the three-segment time contour, with boundary conditions expressing a
real incoming position, boosted oscillator amplitudes on the incoming
segment,

    Im X0 = 0,        v = e^theta conj(u),

and reality of both coordinates and velocities at the final (real-time)
node.  One gauge condition removes the time-translation zero mode.  That is
seven physical conditions plus one gauge for eight real integration
constants (the imaginary part of p0 follows from the others and is checked
a posteriori).

Discretization: node values of X and y are the unknowns, packed as the real
vector ``[Re X_k, Im X_k, Re y_k, Im y_k]`` per node.  Interior collocation
rows use the contour's quadratic-interpolant stencils scaled by the local
|h1 h2|/2 so that their magnitude (and roundoff floor) is commensurate with
the O(1) boundary rows.  The Jacobian is exact and sparse; each Newton step
is solved by a sparse LU factorization with backtracking damping.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.interpolate import CubicSpline

from .asymptotics import apply_fit, build_fit_weights
from .contour import Contour, build_contour
from .errors import (
    MaxItersExceeded,
    SingularJacobian,
    StepCollapse,
    Unclassifiable,
)
from .model import ModelParams, force_2d, force_jacobian_2d, sphaleron_modes, project_to_modes
from .observables import compute_observables, compute_observables_1d
from .types import BranchPath, SaddleSolution, Topology, Trajectory

__all__ = [
    "newton_solve",
    "newton_solve_1d",
    "classify_topology",
    "walk",
    "walk_to",
    "reinterpolate",
    "rebuild_contour",
]


def _force_1d(X: np.ndarray, eps: float):
    """Force -dV/dX and its derivative for V = e^{-i eps} / cosh^2 X."""
    ch = np.cosh(X)
    sh = np.sinh(X)
    phase = np.exp(-1j * eps)
    f = 2.0 * phase * sh / ch**3
    df = 2.0 * phase * (1.0 - 3.0 * (sh / ch) ** 2) / ch**2
    return f, df


def _analytic_block(rows_re, rows_im, cols_re, cols_im, gamma, data):
    """COO entries of a complex-linear term: r += gamma * z."""
    gr, gi = gamma.real, gamma.imag
    data[0].extend([rows_re, rows_re, rows_im, rows_im])
    data[1].extend([cols_re, cols_im, cols_re, cols_im])
    data[2].extend([gr, -gi, gi, gr])


def _antilinear_block(rows_re, rows_im, cols_re, cols_im, gamma, data):
    """COO entries of an antilinear term: r += gamma * conj(z)."""
    gr, gi = gamma.real, gamma.imag
    data[0].extend([rows_re, rows_re, rows_im, rows_im])
    data[1].extend([cols_re, cols_im, cols_re, cols_im])
    data[2].extend([gr, gi, gi, -gr])


class _System2D:
    """Residual/Jacobian assembler for the two-coordinate problem."""

    n_dof = 2  # complex coordinates per node

    def __init__(self, contour: Contour, params: ModelParams, theta: float,
                 gauge: str, pin_value: float):
        self.contour = contour
        self.params = params
        self.theta = theta
        self.gauge = gauge
        self.pin_value = pin_value
        n = contour.n_nodes
        self.n = n
        self.K = np.arange(1, n - 1)
        h = np.abs(np.diff(contour.nodes))
        self.scale = 0.5 * h[self.K - 1] * h[self.K]
        self.fit = build_fit_weights(contour, params.omega)

    # -- packing ----------------------------------------------------------
    def pack(self, traj: Trajectory) -> np.ndarray:
        w = np.empty((self.n, 4))
        w[:, 0], w[:, 1] = traj.X.real, traj.X.imag
        w[:, 2], w[:, 3] = traj.y.real, traj.y.imag
        return w.ravel()

    def unpack(self, w: np.ndarray):
        W = w.reshape(self.n, 4)
        return W[:, 0] + 1j * W[:, 1], W[:, 2] + 1j * W[:, 3]

    def to_traj(self, w: np.ndarray) -> Trajectory:
        X, y = self.unpack(w)
        return Trajectory(X=X, y=y)

    # -- residual ---------------------------------------------------------
    def residual(self, w: np.ndarray) -> np.ndarray:
        c = self.contour
        X, y = self.unpack(w)
        K, s = self.K, self.scale
        fx, fy = force_2d(X[K], y[K], self.params)
        r_x = s * (c.second_derivative(X)[K] - fx)
        r_y = s * (c.second_derivative(y)[K] - fy)

        X0, p0, u, v, _ = apply_fit(self.fit, X, y)
        q = v - np.exp(self.theta) * np.conj(u)
        xd_f = c.first_derivative(X)[-1]
        yd_f = c.first_derivative(y)[-1]
        if self.gauge == "pin":
            g = X[0].real - self.pin_value
        else:  # "turning": Re Xdot = 0 at the contour corner t = 0
            g = c.first_derivative(X)[c.i_c].real

        r = np.empty(4 * self.n)
        body = r[: 4 * (self.n - 2)].reshape(-1, 4)
        body[:, 0], body[:, 1] = r_x.real, r_x.imag
        body[:, 2], body[:, 3] = r_y.real, r_y.imag
        r[-8:] = [X0.imag, q.real, q.imag, X[-1].imag, xd_f.imag,
                  y[-1].imag, yd_f.imag, g]
        return r

    # -- Jacobian ---------------------------------------------------------
    def jacobian(self, w: np.ndarray) -> sp.csc_matrix:
        c = self.contour
        n = self.n
        X, y = self.unpack(w)
        K, s = self.K, self.scale
        data = ([], [], [])  # rows, cols, vals (lists of arrays)

        rows_x_re = 4 * (K - 1)
        rows_y_re = rows_x_re + 2
        # stencil part of X'' and y''
        for j in range(3):
            node = c.idx2[K, j]
            gamma = s * c.c2[K, j]
            _analytic_block(rows_x_re, rows_x_re + 1, 4 * node, 4 * node + 1, gamma, data)
            _analytic_block(rows_y_re, rows_y_re + 1, 4 * node + 2, 4 * node + 3, gamma, data)
        # force part (diagonal in the node index, couples X and y)
        gxx, gxy, gyx, gyy = force_jacobian_2d(X[K], y[K], self.params)
        _analytic_block(rows_x_re, rows_x_re + 1, 4 * K, 4 * K + 1, -s * gxx, data)
        _analytic_block(rows_x_re, rows_x_re + 1, 4 * K + 2, 4 * K + 3, -s * gxy, data)
        _analytic_block(rows_y_re, rows_y_re + 1, 4 * K, 4 * K + 1, -s * gyx, data)
        _analytic_block(rows_y_re, rows_y_re + 1, 4 * K + 2, 4 * K + 3, -s * gyy, data)

        base = 4 * (n - 2)
        fit = self.fit
        idx = fit.idx
        rr, cc, vv = data
        # row base+0: Im X0 = sum wx0_k Im X_k
        rr.append(np.full(len(idx), base))
        cc.append(4 * idx + 1)
        vv.append(fit.wx0.copy())
        # rows base+1, base+2: v - e^theta conj(u), linear part wv, antilinear -e^theta conj(wu)
        rows1 = np.full(len(idx), base + 1)
        _analytic_block(rows1, rows1 + 1, 4 * idx + 2, 4 * idx + 3, fit.wv, data)
        _antilinear_block(rows1, rows1 + 1, 4 * idx + 2, 4 * idx + 3,
                          -np.exp(self.theta) * np.conj(fit.wu), data)
        # row base+3: Im X at final node
        rr.append(np.array([base + 3]))
        cc.append(np.array([4 * (n - 1) + 1]))
        vv.append(np.array([1.0]))
        # row base+4 / base+6: Im of first derivative at final node
        nodes_d = c.idx2[n - 1]
        gam = c.c1[n - 1]
        rr.append(np.full(3, base + 4)); cc.append(4 * nodes_d); vv.append(gam.imag.copy())
        rr.append(np.full(3, base + 4)); cc.append(4 * nodes_d + 1); vv.append(gam.real.copy())
        # row base+5: Im y final
        rr.append(np.array([base + 5]))
        cc.append(np.array([4 * (n - 1) + 3]))
        vv.append(np.array([1.0]))
        rr.append(np.full(3, base + 6)); cc.append(4 * nodes_d + 2); vv.append(gam.imag.copy())
        rr.append(np.full(3, base + 6)); cc.append(4 * nodes_d + 3); vv.append(gam.real.copy())
        # row base+7: gauge
        if self.gauge == "pin":
            rr.append(np.array([base + 7])); cc.append(np.array([0])); vv.append(np.array([1.0]))
        else:
            nodes_c = c.idx2[c.i_c]
            gam_c = c.c1[c.i_c]
            rr.append(np.full(3, base + 7)); cc.append(4 * nodes_c); vv.append(gam_c.real.copy())
            rr.append(np.full(3, base + 7)); cc.append(4 * nodes_c + 1); vv.append(-gam_c.imag.copy())

        rows = np.concatenate([np.asarray(a, dtype=np.int64).ravel() for a in rr])
        cols = np.concatenate([np.asarray(a, dtype=np.int64).ravel() for a in cc])
        vals = np.concatenate([np.asarray(a, dtype=float).ravel() for a in vv])
        return sp.coo_matrix((vals, (rows, cols)), shape=(4 * n, 4 * n)).tocsc()


class _System1D:
    """Assembler for the single-coordinate sech^2 barrier (reference problem)."""

    n_dof = 1

    def __init__(self, contour: Contour, eps: float, gauge: str, pin_value: float):
        self.contour = contour
        self.eps = eps
        self.gauge = gauge
        self.pin_value = pin_value
        n = contour.n_nodes
        self.n = n
        self.K = np.arange(1, n - 1)
        h = np.abs(np.diff(contour.nodes))
        self.scale = 0.5 * h[self.K - 1] * h[self.K]
        self.fit = build_fit_weights(contour, omega=1.0)  # wu/wv unused

    def pack(self, traj: Trajectory) -> np.ndarray:
        w = np.empty((self.n, 2))
        w[:, 0], w[:, 1] = traj.X.real, traj.X.imag
        return w.ravel()

    def unpack(self, w: np.ndarray):
        W = w.reshape(self.n, 2)
        return (W[:, 0] + 1j * W[:, 1],)

    def to_traj(self, w: np.ndarray) -> Trajectory:
        (X,) = self.unpack(w)
        return Trajectory(X=X, y=None)

    def residual(self, w: np.ndarray) -> np.ndarray:
        c = self.contour
        (X,) = self.unpack(w)
        K, s = self.K, self.scale
        f, _ = _force_1d(X[K], self.eps)
        r_x = s * (c.second_derivative(X)[K] - f)

        X0, p0, _, _, _ = apply_fit(self.fit, X, None)
        xd_f = c.first_derivative(X)[-1]
        if self.gauge == "pin":
            g = X[0].real - self.pin_value
        else:
            g = c.first_derivative(X)[c.i_c].real

        r = np.empty(2 * self.n)
        body = r[: 2 * (self.n - 2)].reshape(-1, 2)
        body[:, 0], body[:, 1] = r_x.real, r_x.imag
        r[-4:] = [X0.imag, X[-1].imag, xd_f.imag, g]
        return r

    def jacobian(self, w: np.ndarray) -> sp.csc_matrix:
        c = self.contour
        n = self.n
        (X,) = self.unpack(w)
        K, s = self.K, self.scale
        data = ([], [], [])
        rows_re = 2 * (K - 1)
        for j in range(3):
            node = c.idx2[K, j]
            gamma = s * c.c2[K, j]
            _analytic_block(rows_re, rows_re + 1, 2 * node, 2 * node + 1, gamma, data)
        _, df = _force_1d(X[K], self.eps)
        _analytic_block(rows_re, rows_re + 1, 2 * K, 2 * K + 1, -s * df, data)

        base = 2 * (n - 2)
        fit = self.fit
        idx = fit.idx
        rr, cc, vv = data
        rr.append(np.full(len(idx), base)); cc.append(2 * idx + 1); vv.append(fit.wx0.copy())
        rr.append(np.array([base + 1])); cc.append(np.array([2 * (n - 1) + 1])); vv.append(np.array([1.0]))
        nodes_d = c.idx2[n - 1]
        gam = c.c1[n - 1]
        rr.append(np.full(3, base + 2)); cc.append(2 * nodes_d); vv.append(gam.imag.copy())
        rr.append(np.full(3, base + 2)); cc.append(2 * nodes_d + 1); vv.append(gam.real.copy())
        if self.gauge == "pin":
            rr.append(np.array([base + 3])); cc.append(np.array([0])); vv.append(np.array([1.0]))
        else:
            nodes_c = c.idx2[c.i_c]
            gam_c = c.c1[c.i_c]
            rr.append(np.full(3, base + 3)); cc.append(2 * nodes_c); vv.append(gam_c.real.copy())
            rr.append(np.full(3, base + 3)); cc.append(2 * nodes_c + 1); vv.append(-gam_c.imag.copy())

        rows = np.concatenate([np.asarray(a, dtype=np.int64).ravel() for a in rr])
        cols = np.concatenate([np.asarray(a, dtype=np.int64).ravel() for a in cc])
        vals = np.concatenate([np.asarray(a, dtype=float).ravel() for a in vv])
        return sp.coo_matrix((vals, (rows, cols)), shape=(2 * n, 2 * n)).tocsc()


# ---------------------------------------------------------------------------
# Newton driver
# ---------------------------------------------------------------------------


def _try_step(system, w, step, norm, tol, n_halvings: int = 9):
    """Backtracking line search; returns (w, r, norm) or None if no progress."""
    lam = 1.0
    for _ in range(n_halvings):
        w_try = w + lam * step
        r_try = system.residual(w_try)
        norm_try = np.linalg.norm(r_try) / np.sqrt(len(r_try))
        if np.isfinite(norm_try) and (norm_try < (1.0 - 1e-4 * lam) * norm
                                      or norm_try < tol):
            return w_try, r_try, norm_try
        lam *= 0.5
    return None


def _newton(system, w0: np.ndarray, tol: float, max_iters: int,
            stall_tol: float = 1e-6):
    """Damped Newton iteration; returns (w, residual_norm, iterations).

    Trajectories that linger near the potential saddle make the linearized
    problem exponentially ill-conditioned: perturbations of the escaped
    part of the trajectory decay backwards through the interaction region,
    so they are nearly unconstrained, and the plain Newton step amplifies
    roundoff (and genuinely soft corrections) into huge displacements that
    the Gaussian barrier term turns into overflow.  When the line search
    rejects the plain step, a Levenberg-Marquardt ladder
    (J^T J + mu^2) d = -J^T r with decreasing mu supplies conservatively
    damped directions instead.

    If no damping level makes progress and the best residual is below
    ``stall_tol``, the iteration counts as converged (the floor is set by
    conditioning, not by the discretization); otherwise MaxItersExceeded.
    """
    w = w0.copy()
    r = system.residual(w)
    norm = np.linalg.norm(r) / np.sqrt(len(r))
    for it in range(1, max_iters + 1):
        if norm < tol:
            return w, norm, it - 1
        J = system.jacobian(w)
        try:
            lu = spla.splu(J)
        except RuntimeError as exc:
            raise SingularJacobian(str(exc)) from exc
        step = lu.solve(-r)
        accepted = None
        if np.all(np.isfinite(step)):
            accepted = _try_step(system, w, step, norm, tol)
        if accepted is None:
            jt_r = J.T @ r
            eye = sp.identity(J.shape[0], format="csc")
            jtj = (J.T @ J).tocsc()
            for mu in (1e-8, 1e-6, 1e-4, 1e-2):
                try:
                    step = spla.splu(jtj + mu * mu * eye).solve(-jt_r)
                except RuntimeError:
                    continue
                if not np.all(np.isfinite(step)):
                    continue
                accepted = _try_step(system, w, step, norm, tol)
                if accepted is not None:
                    break
        if accepted is None:
            if norm < stall_tol:
                return w, norm, it
            raise MaxItersExceeded(
                f"line search stalled at residual {norm:.3e} after {it} iterations"
            )
        w, r, norm = accepted
    if norm < tol or norm < stall_tol:
        return w, norm, max_iters
    raise MaxItersExceeded(f"residual {norm:.3e} > tol {tol:.1e} after {max_iters} iterations")


def _finish(system, w, norm, iters, contour, T, theta, params) -> SaddleSolution:
    traj = system.to_traj(w)
    if traj.y is not None:
        X0, p0, u, v, res = apply_fit(system.fit, traj.X, traj.y, check=True)
        traj.X0, traj.p0, traj.u, traj.v, traj.fit_residual = X0, p0, u, v, res
        obs = compute_observables(traj, contour, T, theta, params)
        try:
            topo = classify_topology(traj, contour, params)
        except Unclassifiable:
            topo = None  # call classify_topology directly for a hard check
    else:
        X0, p0, _, _, res = apply_fit(system.fit, traj.X, None, check=True)
        traj.X0, traj.p0, traj.fit_residual = X0, p0, res
        obs = compute_observables_1d(traj, contour, T, system.eps)
        topo = None
    eps = params.epsilon if traj.y is not None else system.eps
    return SaddleSolution(
        traj=traj,
        contour=contour,
        T=T,
        theta=theta,
        eps=eps,
        E=obs.E,
        N=obs.N,
        F=obs.F,
        T_int=obs.T_int,
        topology=topo,
        residual_norm=norm,
        newton_iters=iters,
    )


def newton_solve(
    guess: Trajectory,
    contour: Contour,
    T: float,
    theta: float,
    params: ModelParams,
    tol: float = 1e-10,
    max_iters: int = 50,
    gauge: str = "pin",
    pin_value: Optional[float] = None,
) -> SaddleSolution:
    """Converge the two-coordinate saddle from ``guess`` at fixed (T, theta, eps).

    Parameters
    ----------
    gauge : {"pin", "turning"}
        Time-translation gauge: "pin" fixes Re X at the first node to
        ``pin_value`` (default: its value in the guess); "turning" demands
        Re dX/dt = 0 at the contour corner t = 0.  "pin" works on every
        branch, including over-barrier ones where no turning point exists.

    Raises
    ------
    MaxItersExceeded, SingularJacobian
    """
    if pin_value is None:
        pin_value = float(guess.X[0].real)
    system = _System2D(contour, params, theta, gauge, pin_value)
    w, norm, iters = _newton(system, system.pack(guess), tol, max_iters)
    return _finish(system, w, norm, iters, contour, T, theta, params)


def newton_solve_1d(
    guess: Trajectory,
    contour: Contour,
    T: float,
    eps: float = 0.0,
    tol: float = 1e-10,
    max_iters: int = 50,
    gauge: str = "pin",
    pin_value: Optional[float] = None,
) -> SaddleSolution:
    """Single-coordinate analog of :func:`newton_solve` (oracle problem)."""
    if pin_value is None:
        pin_value = float(guess.X[0].real)
    system = _System1D(contour, eps, gauge, pin_value)
    w, norm, iters = _newton(system, system.pack(guess), tol, max_iters)
    params = ModelParams()  # not used beyond the signature of _finish
    return _finish(system, w, norm, iters, contour, T, 0.0, params)


# ---------------------------------------------------------------------------
# Topology classification
# ---------------------------------------------------------------------------


def classify_topology(
    traj: Trajectory,
    contour: Contour,
    params: ModelParams,
    x_far: float = 8.0,
) -> Topology:
    """Classify where the trajectory ends up on the final real-time segment.

    Transmission: Re X beyond +x_far and still moving forward.
    Reflection:   Re X beyond -x_far moving backward.
    SphaleronBound: stays in the interaction region while the unstable-mode
    amplitude decays exponentially (the solution relaxes onto the saddle of
    the potential instead of escaping).
    """
    x_end = traj.X[-1].real
    xd_end = contour.first_derivative(traj.X)[-1].real
    if x_end > x_far and xd_end > 0:
        return Topology.TRANSMISSION
    if x_end < -x_far and xd_end < 0:
        return Topology.REFLECTION

    # Sphaleron-bound test on the last quarter of the real segment.
    n_cd = contour.n_cd
    tail = slice(contour.n_nodes - max(n_cd // 4, 8), contour.n_nodes)
    if abs(x_end) < x_far:
        modes = sphaleron_modes(params.omega)
        _, c_minus = project_to_modes(traj.X[tail], traj.y[tail], modes)
        amp = np.abs(c_minus)
        t_tail = contour.nodes[tail].real
        good = amp > 1e-14
        if np.count_nonzero(good) >= 4:
            slope = np.polyfit(t_tail[good], np.log(amp[good]), 1)[0]
        else:
            slope = -np.inf  # amplitude already at roundoff: fully relaxed
        if slope < -0.1 * np.sqrt(modes.omega_minus_sq):
            return Topology.SPHALERON_BOUND
    raise Unclassifiable(
        f"endpoint Re X = {x_end:.3f}, Re dX/dt = {xd_end:.3f}: "
        "neither escaped nor sphaleron-bound; increase t_right"
    )


# ---------------------------------------------------------------------------
# Continuation
# ---------------------------------------------------------------------------


def rebuild_contour(old: Contour, T: float) -> Contour:
    """New contour at height T keeping the grid resolution of ``old``."""
    h_ab = abs(old.t_left) / old.n_ab
    if old.n_bc > 0 and old.T > 0:
        h_bc = (old.T / 2.0) / old.n_bc
    else:
        h_bc = h_ab
    n_bc = max(16, int(round((T / 2.0) / h_bc))) if T > 0 else 0
    return build_contour(
        T=T,
        t_left=old.t_left,
        t_right=old.t_right,
        n_ab=old.n_ab,
        n_bc=n_bc,
        n_cd=old.n_cd,
    )


def _segment_slices(c: Contour):
    return (
        slice(0, c.n_ab + 1),
        slice(c.i_b, c.i_c + 1),
        slice(c.i_c, c.n_nodes),
    )


def reinterpolate(traj: Trajectory, old: Contour, new: Contour) -> Trajectory:
    """Resample a trajectory onto a new contour, segment by segment.

    Node values are interpolated (cubic) against the fractional position
    along each segment, which maps corners to corners even when T changes.
    """
    def seg_param(c, sl):
        t = c.nodes[sl]
        if len(t) < 2:
            return np.zeros(len(t))
        d = np.abs(np.diff(t))
        s = np.concatenate([[0.0], np.cumsum(d)])
        return s / s[-1]

    fields = [traj.X] if traj.y is None else [traj.X, traj.y]
    out = []
    for f in fields:
        g = np.empty(new.n_nodes, dtype=complex)
        for sl_old, sl_new in zip(_segment_slices(old), _segment_slices(new)):
            fo = f[sl_old]
            so = seg_param(old, sl_old)
            sn = seg_param(new, sl_new)
            if len(fo) >= 4:
                g[sl_new] = CubicSpline(so, fo)(sn)
            elif len(fo) >= 2:
                g[sl_new] = np.interp(sn, so, fo.real) + 1j * np.interp(sn, so, fo.imag)
            else:
                g[sl_new] = fo[0] if len(fo) else 0.0
        out.append(g)
    if traj.y is None:
        return Trajectory(X=out[0], y=None)
    return Trajectory(X=out[0], y=out[1])


def _solve_at(sol: SaddleSolution, T, theta, eps, params, tol, gauge, max_iters=50):
    """One continuation step: retarget (T, theta, eps) seeded by ``sol``."""
    if abs(T - sol.T) > 1e-15:
        contour = rebuild_contour(sol.contour, T)
        seed = reinterpolate(sol.traj, sol.contour, contour)
    else:
        contour = sol.contour
        seed = sol.traj
    p = params.with_epsilon(eps)
    return newton_solve(seed, contour, T, theta, p, tol=tol, gauge=gauge,
                        max_iters=max_iters)


def walk(
    start: SaddleSolution,
    params: ModelParams,
    dT: float = 0.0,
    dtheta: float = 0.0,
    deps: float = 0.0,
    n_steps: int = 1,
    tol: float = 1e-10,
    gauge: str = "pin",
    max_halvings: int = 8,
    callback: Optional[Callable[[SaddleSolution], None]] = None,
) -> BranchPath:
    """Continue a branch by n_steps increments of (dT, dtheta, deps).

    Each failed Newton solve triggers step halving (up to ``max_halvings``);
    a step that cannot be completed raises :class:`StepCollapse`.
    """
    path = BranchPath()
    path.append(start)
    cur = start
    for _ in range(n_steps):
        target = (cur.T + dT, cur.theta + dtheta, cur.eps + deps)
        cur = _advance(cur, target, params, tol, gauge, max_halvings)
        path.append(cur)
        if callback is not None:
            callback(cur)
    return path


def _advance(cur, target, params, tol, gauge, max_halvings):
    """Move from ``cur`` to target knobs, halving the substep on failure."""
    T1, th1, e1 = target
    frac_done = 0.0
    frac_step = 1.0
    halvings = 0
    while frac_done < 1.0 - 1e-12:
        frac_try = min(frac_done + frac_step, 1.0)
        T = _lerp(cur, "T", T1, frac_try, frac_done)
        th = _lerp(cur, "theta", th1, frac_try, frac_done)
        ep = _lerp(cur, "eps", e1, frac_try, frac_done)
        try:
            nxt = _solve_at(cur, T, th, ep, params, tol, gauge)
        except (MaxItersExceeded, SingularJacobian):
            halvings += 1
            if halvings > max_halvings:
                raise StepCollapse(
                    f"continuation stalled near T={cur.T:.4f}, theta={cur.theta:.4f}, "
                    f"eps={cur.eps:.5f}"
                )
            frac_step /= 2.0
            continue
        cur = nxt
        frac_done = frac_try
    return cur


def _lerp(cur, attr, end, frac_try, frac_done):
    start = getattr(cur, attr)
    # knobs move linearly in the *remaining* interval
    remaining = 1.0 - frac_done
    if remaining <= 0:
        return end
    w = (frac_try - frac_done) / remaining
    return start + (end - start) * w


def walk_to(
    start: SaddleSolution,
    params: ModelParams,
    T: Optional[float] = None,
    theta: Optional[float] = None,
    eps: Optional[float] = None,
    max_step: float = 0.1,
    tol: float = 1e-10,
    gauge: str = "pin",
) -> SaddleSolution:
    """Walk to absolute target knobs along a straight line in (T, theta, eps)."""
    T1 = start.T if T is None else T
    th1 = start.theta if theta is None else theta
    e1 = start.eps if eps is None else eps
    dist = max(abs(T1 - start.T), abs(th1 - start.theta), abs(e1 - start.eps) * 20.0)
    n = max(1, int(np.ceil(dist / max_step)))
    path = walk(
        start, params,
        dT=(T1 - start.T) / n,
        dtheta=(th1 - start.theta) / n,
        deps=(e1 - start.eps) / n,
        n_steps=n, tol=tol, gauge=gauge,
    )
    return path.last
