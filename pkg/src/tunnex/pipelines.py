"""High-level solve routes built from the contour solver.

Every nontrivial result in the package is reached by the same pattern:
converge an easy starting saddle (a real bounce-orbit seed at
theta = eps = 0), then continue in small steps of the knobs (T, theta, eps)
to wherever the physics question lives.  This module packages the standard
routes:

* ``instanton_start``      -- converged bounce-orbit saddle at given T,
* ``solve_at_EN``          -- Broyden outer loop on (T, theta) to hit (E, N),
* ``walk_constant_N``      -- scan E at fixed N (topology changes exposed),
* ``eps_ray_family``       -- follow T = eps*tau, theta = eps*vartheta down
                              an eps ladder (classically-allowed limit),
* ``locate_ray_limit``     -- classical-shooting prediction of where such a
                              ray lands at eps -> 0,
* ``seed_allowed_solution`` -- converge the quasi-real saddle next to a
                              classical over-barrier shot,
* ``allowed_region_limit`` -- eps -> 0 limit point of such a ray,
* ``boundary_from_tau_limit`` -- tau -> infinity limit at fixed tau/vartheta
                              (approach to the classical boundary E0(N)).
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .bvp import newton_solve, walk_to
from .classical import ShotSpec, find_E0, shoot, tint_phase_scan
from .contour import build_contour
from .errors import StepCollapse
from .model import ModelParams
from .observables import EpsFamily, extrapolate_eps
from .seeds import periodic_instanton_seed
from .types import BranchPath, SaddleSolution, Trajectory

__all__ = [
    "instanton_start",
    "solve_at_EN",
    "walk_constant_N",
    "eps_ray_family",
    "locate_ray_limit",
    "seed_allowed_solution",
    "allowed_region_limit",
    "boundary_from_tau_limit",
]


def instanton_start(
    T: float,
    params: Optional[ModelParams] = None,
    t_left: float = -20.0,
    t_right: float = 16.0,
    n_ab: int = 480,
    n_cd: int = 400,
    h_bc: float = 0.035,
    tol: float = 1e-10,
) -> SaddleSolution:
    """Converged saddle at theta = eps = 0 seeded by the bounce orbit."""
    params = params or ModelParams()
    n_bc = max(16, int(round((T / 2.0) / h_bc)))
    contour = build_contour(T=T, t_left=t_left, t_right=t_right,
                            n_ab=n_ab, n_bc=n_bc, n_cd=n_cd)
    seed = periodic_instanton_seed(T, contour, params)
    return newton_solve(seed, contour, T, 0.0, params.with_epsilon(0.0), tol=tol)


def _en_jacobian(cur: SaddleSolution, params: ModelParams, fd_step: float,
                 max_step: float) -> np.ndarray:
    """Finite-difference 2x2 Jacobian d(E, N)/d(T, theta) at ``cur``."""
    sol_t = walk_to(cur, params, T=cur.T + fd_step, max_step=max_step)
    sol_h = walk_to(cur, params, theta=cur.theta + fd_step, max_step=max_step)
    return np.array([
        [(sol_t.E - cur.E) / fd_step, (sol_h.E - cur.E) / fd_step],
        [(sol_t.N - cur.N) / fd_step, (sol_h.N - cur.N) / fd_step],
    ])


def _en_newton(cur: SaddleSolution, E: float, N: float, params: ModelParams,
               tol_en: float, fd_step: float, max_step: float,
               max_iters: int = 12, dx_cap: float = 0.2,
               loose_tol: float = 5e-4) -> SaddleSolution:
    """Newton on (T, theta) -> (E, N) for a nearby target (fresh FD Jacobian).

    The knob step is capped at ``dx_cap`` and backtracked when the target
    mismatch grows: the map is not injective globally, and an uncontrolled
    step can hop to another (T, theta) sheet carrying the same (E, N).
    A stall within ``loose_tol`` counts as success (the finite-difference
    Jacobian cannot resolve targets much below the re-solve noise floor).
    """
    f = np.array([cur.E - E, cur.N - N])
    for _ in range(max_iters):
        if np.max(np.abs(f)) < tol_en:
            return cur
        jac = _en_jacobian(cur, params, fd_step, max_step)
        try:
            dx = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError as exc:
            raise StepCollapse(f"singular (E,N) Jacobian: {exc}") from exc
        dx /= max(np.max(np.abs(dx)) / dx_cap, 1.0)
        improved = False
        for _ in range(5):
            nxt = walk_to(cur, params, T=cur.T + dx[0], theta=cur.theta + dx[1],
                          max_step=max_step)
            f_new = np.array([nxt.E - E, nxt.N - N])
            if np.max(np.abs(f_new)) < np.max(np.abs(f)):
                cur, f = nxt, f_new
                improved = True
                break
            dx /= 2.0
        if not improved:
            break
    if np.max(np.abs(f)) < max(tol_en, loose_tol):
        return cur
    raise StepCollapse(f"(E, N) Newton stalled at dE={f[0]:.2e}, dN={f[1]:.2e}")


def solve_at_EN(
    E: float,
    N: float,
    eps: float,
    start: SaddleSolution,
    params: Optional[ModelParams] = None,
    tol_en: float = 1e-4,
    fd_step: float = 2e-3,
    max_step: float = 0.15,
    stage: float = 0.05,
    max_halvings: int = 8,
) -> SaddleSolution:
    """Adjust (T, theta) until the saddle carries the requested (E, N).

    The map (T, theta) -> (E, N) is strongly nonlinear over large target
    moves, so the target is approached in stages of at most ``stage`` in
    max(|dE|, |dN|); each stage runs a small Newton iteration with a fresh
    finite-difference Jacobian, and a failed stage is halved (up to
    ``max_halvings`` times).  ``start`` must already sit at the requested
    eps (it is walked there first otherwise).
    """
    params = params or ModelParams()
    if abs(start.eps - eps) > 1e-12:
        start = walk_to(start, params, eps=eps, max_step=max_step)

    cur = start
    frac_done, frac_step = 0.0, 1.0
    dist = max(abs(E - cur.E), abs(N - cur.N))
    if dist > stage:
        frac_step = stage / dist
    e0, n0 = cur.E, cur.N
    halvings = 0
    while frac_done < 1.0 - 1e-12:
        frac_try = min(frac_done + frac_step, 1.0)
        e_t = e0 + (E - e0) * frac_try
        n_t = n0 + (N - n0) * frac_try
        try:
            cur = _en_newton(cur, e_t, n_t, params, tol_en, fd_step, max_step)
        except StepCollapse:
            halvings += 1
            if halvings > max_halvings:
                raise
            frac_step /= 2.0
            continue
        frac_done = frac_try
    return cur


def walk_constant_N(
    start: SaddleSolution,
    N: float,
    e_values: Sequence[float],
    params: Optional[ModelParams] = None,
    eps: Optional[float] = None,
    tol_en: float = 1e-4,
    fd_step: float = 2e-3,
) -> BranchPath:
    """Scan the branch along E at fixed N (and fixed eps).

    Returns the path of solutions at the requested energies, each seeded by
    its predecessor.  The topology attribute of the members exposes where
    the branch stops transmitting.
    """
    params = params or ModelParams()
    eps = start.eps if eps is None else eps
    path = BranchPath()
    cur = start
    for e in e_values:
        cur = solve_at_EN(e, N, eps, cur, params, tol_en=tol_en, fd_step=fd_step)
        path.append(cur)
    return path


def eps_ray_family(
    start: SaddleSolution,
    tau: float,
    vartheta: float,
    eps_seq: Sequence[float],
    params: Optional[ModelParams] = None,
    max_step: float = 0.1,
) -> EpsFamily:
    """Follow the ray T = eps*tau, theta = eps*vartheta down an eps ladder.

    In the classically allowed region the saddle family only survives the
    eps -> 0 limit along such rays; F vanishes linearly in eps while (E, N)
    approach the classical values.
    """
    params = params or ModelParams()
    sols = []
    cur = start
    for eps in eps_seq:
        cur = walk_to(cur, params, T=eps * tau, theta=eps * vartheta, eps=eps,
                      max_step=max_step)
        sols.append(cur)
    return EpsFamily(solutions=sols)


def _boundary_slope(N: float, params: ModelParams, dN: float) -> float:
    return (find_E0(N + dN, params) - find_E0(N - dN, params)) / (2.0 * dN)


def locate_ray_limit(
    tau: float,
    vartheta: float,
    params: Optional[ModelParams] = None,
    N_bounds: tuple = (0.2, 0.8),
    dN: float = 0.05,
    max_iter: int = 6,
) -> dict:
    """Classical-shooting prediction of the eps -> 0 limit point of a ray.

    With both ray parameters positive the limit sits just inside the
    descending branch of the boundary E0(N), fixed by two conditions on the
    minimal interaction time t_int(E, N) of transmitted shots:

    * the boundary slope at the limit N equals -vartheta/tau (the near-
      boundary divergence of t_int dominates its gradient, so the gradient
      direction is normal to the boundary and its components must be in the
      ray's ratio), and
    * -2 dt_int/dE = tau, which with the logarithmic divergence
      t_int ~ A - B*log(E - E0(N)) places the limit at E = E0 + 2B/tau.

    Returns a dict with the predicted (E, N), the boundary energy E0, the
    divergence coefficient B ("t_slope"), and the minimizing phase and
    minimal interaction time of the scan at the predicted point.
    """
    params = params or ModelParams()
    target = -vartheta / tau
    a, b = N_bounds
    fa = _boundary_slope(a, params, dN) - target
    fb = _boundary_slope(b, params, dN) - target
    for _ in range(max_iter):
        if abs(fb - fa) < 1e-12:
            break
        m = float(np.clip(b - fb * (b - a) / (fb - fa), N_bounds[0], N_bounds[1]))
        fm = _boundary_slope(m, params, dN) - target
        a, fa, b, fb = b, fb, m, fm
        if abs(fm) < 5e-3:
            break
    n_b = b
    e0 = find_E0(n_b, params)
    d1, d2 = 0.01, 0.02
    *_, t1 = tint_phase_scan(e0 + d1, n_b, params)
    *_, t2 = tint_phase_scan(e0 + d2, n_b, params)
    t_slope = (t1 - t2) / np.log(d2 / d1)
    e_lim = e0 + 2.0 * t_slope / tau
    _, _, phi_star, t_min = tint_phase_scan(e_lim, n_b, params)
    return {"E": float(e_lim), "N": float(n_b), "E0": float(e0),
            "t_slope": float(t_slope), "phi": phi_star, "t_int": t_min}


def seed_allowed_solution(
    E: float,
    N: float,
    phi: float,
    T: float,
    theta: float,
    eps: float,
    params: Optional[ModelParams] = None,
    t_left: float = -30.0,
    t_right: float = 24.0,
    n_ab: int = 600,
    n_cd: int = 520,
    h_bc: float = 0.05,
    x_start: float = -14.0,
    shift: float = 25.0,
    tol: float = 1e-10,
) -> SaddleSolution:
    """Converge the quasi-real saddle next to a classical over-barrier shot.

    The seed places the real classical trajectory launched at ``x_start``
    with oscillator phase ``phi`` on the contour (real part of contour time,
    shifted so the launch sits ``shift`` before the contour origin) and
    extends it by free asymptotics on both ends.  At small eps the true
    saddle is an O(eps) complex deformation of this trajectory, so Newton
    converges from the purely real seed.
    """
    params = params or ModelParams()
    w = params.omega
    res = shoot(ShotSpec(E=E, N=N, phi=phi, x_start=x_start), params, dense=True)
    t_e, dense, zf = res.t_end, res.sol.sol, res.sol.y[:, -1]
    contour = build_contour(T=T, t_left=t_left, t_right=t_right, n_ab=n_ab,
                            n_bc=max(16, int(round((T / 2.0) / h_bc))), n_cd=n_cd)
    pmom = np.sqrt(2.0 * (E - w * N))
    amp = np.sqrt(2.0 * N / w)

    def value(t):
        ts = t.real + shift
        dt = 1j * t.imag
        if ts < 0.0:
            return x_start + pmom * (ts + dt), amp * np.cos(w * (ts + dt) + phi)
        if ts > t_e:
            return (zf[0] + zf[2] * (ts + dt - t_e),
                    zf[1] * np.cos(w * (ts + dt - t_e))
                    + (zf[3] / w) * np.sin(w * (ts + dt - t_e)))
        z = dense(ts)
        return z[0] + 0j, z[1] + 0j

    vals = np.array([value(t) for t in contour.nodes])
    seed = Trajectory(X=vals[:, 0], y=vals[:, 1])
    return newton_solve(seed, contour, T, theta, params.with_epsilon(eps), tol=tol)


def allowed_region_limit(
    tau: float,
    vartheta: float,
    eps_seq: Sequence[float],
    params: Optional[ModelParams] = None,
    loc: Optional[dict] = None,
    max_step: float = 0.02,
    **seed_kwargs,
) -> dict:
    """eps -> 0 limit of the ray (tau, vartheta): classical (E, N), F -> 0.

    The first rung of ``eps_seq`` (which should be small, <= 0.003, and
    decreasing) is converged directly from a classical over-barrier seed at
    the predicted limit point; the rest of the ladder is continued downward
    and the ``extrapolate_eps`` fit gives the limit.  ``loc`` can pass a
    precomputed ``locate_ray_limit`` result to skip the classical search.
    """
    params = params or ModelParams()
    eps_seq = [float(e) for e in eps_seq]
    if loc is None:
        loc = locate_ray_limit(tau, vartheta, params)
    e_first = eps_seq[0]
    sol = seed_allowed_solution(loc["E"], loc["N"], loc["phi"],
                                T=e_first * tau, theta=e_first * vartheta,
                                eps=e_first, params=params, **seed_kwargs)
    sols = [sol]
    for eps in eps_seq[1:]:
        sol = walk_to(sol, params, T=eps * tau, theta=eps * vartheta, eps=eps,
                      max_step=max_step)
        sols.append(sol)
    family = EpsFamily(solutions=sols)
    out = extrapolate_eps(family)
    out["family"] = family
    out["loc"] = loc
    out["t_int_limit"] = float(sols[-1].T_int)
    return out


def boundary_from_tau_limit(
    tau_over_vartheta: float,
    params: Optional[ModelParams] = None,
    tau_seq: Sequence[float] = (140.0, 200.0, 280.0, 380.0),
    eps: float = 0.001,
    loc: Optional[dict] = None,
    cross_check: bool = True,
    **seed_kwargs,
) -> dict:
    """Approach the classical boundary E0(N): tau -> infinity at fixed tau*.

    Each tau in ``tau_seq`` is solved at fixed ratio theta = T/tau* and small
    eps from its own classical seed (the rays share the limit N, only the
    offset E - E0 ~ 2B/tau changes), and (E, N) are extrapolated linearly in
    1/tau.  The extrapolated energy is cross-checked against find_E0 at the
    extrapolated N.
    """
    params = params or ModelParams()
    taus = sorted(float(t) for t in tau_seq)
    if loc is None:
        loc = locate_ray_limit(taus[-1], taus[-1] / tau_over_vartheta, params)
    es, ns, sols = [], [], []
    for tau in taus:
        e_g = loc["E0"] + 2.0 * loc["t_slope"] / tau
        _, _, phi, _ = tint_phase_scan(e_g, loc["N"], params)
        sol = seed_allowed_solution(e_g, loc["N"], phi, T=eps * tau,
                                    theta=eps * tau / tau_over_vartheta,
                                    eps=eps, params=params, **seed_kwargs)
        es.append(sol.E)
        ns.append(sol.N)
        sols.append(sol)
    inv = 1.0 / np.asarray(taus)
    e_fit = np.polyfit(inv, es, 1)
    n_fit = np.polyfit(inv, ns, 1)
    out = {
        "E": float(e_fit[-1]),
        "N": float(n_fit[-1]),
        "E_path": np.array(es),
        "N_path": np.array(ns),
        "tau_seq": np.array(taus),
        "loc": loc,
        "last": sols[-1],
    }
    if cross_check:
        out["E0_classical"] = float(find_E0(out["N"], params))
    return out
