"""Real classical trajectories: over-barrier transmission and its boundary.

A classical shot launches the system far to the left of the barrier with
energy E split between the longitudinal motion and the oscillator at
occupation N and phase phi,

    X = x_start,  dX/dt = sqrt(2 (E - omega N)),
    y = sqrt(2 N / omega) cos(phi),   dy/dt = -sqrt(2 N omega) sin(phi),

and integrates until it escapes forward (Transmission), escapes backward
(Reflection), or the time budget runs out (Undecided).  The classically
allowed region is E > E0(N), where E0(N) is the lowest energy at which some
oscillator phase transmits; it is found by bisection in E over a phase scan
with a golden-section refinement of the most penetrating phase.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp

from .errors import BracketError
from .model import ModelParams, force_2d, hamiltonian_2d, potential_2d

__all__ = [
    "Outcome",
    "ShotSpec",
    "ShotResult",
    "shoot",
    "find_E0",
    "excited_sphaleron_probe",
    "tint_phase_scan",
]


class Outcome(Enum):
    TRANSMITTED = "Transmitted"
    REFLECTED = "Reflected"
    UNDECIDED = "Undecided"


@dataclass(frozen=True)
class ShotSpec:
    """Launch parameters of a classical shot.

    x_start must sit deep in the free region (|x_start| >= 8); the escape
    threshold x_far applies to the barrier-centered coordinate.
    """

    E: float
    N: float
    phi: float
    x_start: float = -14.0
    x_far: float = 8.0
    t_max: float = 400.0
    rtol: float = 1e-10
    atol: float = 1e-12

    def __post_init__(self):
        if abs(self.x_start) < 8.0:
            raise ValueError("x_start must satisfy |x_start| >= 8")
        if self.E <= 0 or self.N < 0:
            raise ValueError("need E > 0 and N >= 0")


@dataclass
class ShotResult:
    outcome: Outcome
    t_end: float
    x_end: float
    x_max: float
    T_int: float
    energy_drift: float
    sol: object = None


def shoot(spec: ShotSpec, params: ModelParams, dense: bool = False) -> ShotResult:
    """Integrate one classical shot and classify its outcome.

    T_int (the time integral of the barrier term along the trajectory) is
    accumulated as an auxiliary quadrature variable.  The relative energy
    drift between launch and the final point is reported as a quality check.
    """
    w = params.omega
    if spec.E <= w * spec.N:
        raise ValueError("E must exceed omega*N for a forward launch")
    p_x = np.sqrt(2.0 * (spec.E - w * spec.N))
    y0 = np.sqrt(2.0 * spec.N / w) * np.cos(spec.phi)
    v0 = -np.sqrt(2.0 * spec.N * w) * np.sin(spec.phi)

    def rhs(t, z):
        X, y, vx, vy, _ = z
        fX, fy = force_2d(X, y, params)
        u_int = np.exp(-0.5 * (X + y) ** 2)
        return [vx, vy, fX.real, fy.real, u_int]

    def hit_forward(t, z):
        return z[0] - spec.x_far
    hit_forward.terminal = True
    hit_forward.direction = 1.0

    def hit_backward(t, z):
        return z[0] - spec.x_start
    hit_backward.terminal = True
    hit_backward.direction = -1.0

    z0 = [spec.x_start, y0, p_x, v0, 0.0]
    sol = solve_ivp(
        rhs, (0.0, spec.t_max), z0, method="DOP853",
        rtol=spec.rtol, atol=spec.atol,
        events=[hit_forward, hit_backward], dense_output=dense,
    )
    zf = sol.y[:, -1]
    h0 = hamiltonian_2d(z0[0], z0[1], z0[2], z0[3], params).real
    hf = hamiltonian_2d(zf[0], zf[1], zf[2], zf[3], params).real
    drift = abs(hf - h0) / max(abs(h0), 1e-30)

    if sol.t_events[0].size > 0:
        outcome = Outcome.TRANSMITTED
    elif sol.t_events[1].size > 0:
        outcome = Outcome.REFLECTED
    else:
        outcome = Outcome.UNDECIDED
    return ShotResult(
        outcome=outcome,
        t_end=float(sol.t[-1]),
        x_end=float(zf[0]),
        x_max=float(sol.y[0].max()),
        T_int=float(zf[4]),
        energy_drift=float(drift),
        sol=sol if dense else None,
    )


def _golden_max(f, a: float, b: float, tol: float = 1e-4, max_iter: int = 60):
    """Golden-section maximization of a unimodal scalar function on [a, b]."""
    inv_phi = (np.sqrt(5.0) - 1.0) / 2.0
    x1 = b - inv_phi * (b - a)
    x2 = a + inv_phi * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if b - a < tol:
            break
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + inv_phi * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - inv_phi * (b - a)
            f1 = f(x1)
    return ((a + b) / 2.0, max(f1, f2))


def _transmits(E: float, N: float, params: ModelParams, n_phi: int,
               x_start: float, t_max: float):
    """Whether any oscillator phase transmits at (E, N).

    Scans a uniform phi grid and refines around the deepest-penetrating
    phase by golden-section maximization of the largest X reached, so that
    narrow transmission windows between grid points are not missed.
    Returns (transmitted, best_phi).
    """
    phis = np.linspace(0.0, 2.0 * np.pi, n_phi, endpoint=False)
    depth = np.empty(n_phi)
    for i, phi in enumerate(phis):
        res = shoot(ShotSpec(E=E, N=N, phi=phi, x_start=x_start, t_max=t_max), params)
        if res.outcome is Outcome.TRANSMITTED:
            return True, float(phi)
        depth[i] = res.x_max
    k = int(depth.argmax())
    dphi = 2.0 * np.pi / n_phi

    def depth_of(phi):
        res = shoot(ShotSpec(E=E, N=N, phi=phi, x_start=x_start, t_max=t_max), params)
        if res.outcome is Outcome.TRANSMITTED:
            return np.inf
        return res.x_max

    phi_best, d_best = _golden_max(depth_of, phis[k] - dphi, phis[k] + dphi)
    return bool(np.isinf(d_best) or d_best > 8.0), float(phi_best % (2.0 * np.pi))


def find_E0(
    N: float,
    params: Optional[ModelParams] = None,
    tol: float = 2e-3,
    n_phi: int = 64,
    x_start: float = -14.0,
    t_max: float = 400.0,
    e_hint: Optional[tuple] = None,
) -> float:
    """Classical transmission boundary E0(N) by bisection over phase scans.

    At each trial energy the predicate is "some phase transmits"; the
    bracket starts just above the larger of the barrier height and the
    oscillator energy, and expands upward until a transmitting energy is
    found.  ``e_hint=(lo, hi)`` can pre-seed the bracket.
    """
    params = params or ModelParams()
    w = params.omega
    lo = max(1.0, w * N) * (1.0 + 1e-9) if e_hint is None else e_hint[0]
    hi = lo * 1.05 if e_hint is None else e_hint[1]

    def ok(E):
        return _transmits(E, N, params, n_phi, x_start, t_max)[0]

    if ok(lo):
        raise BracketError(f"lower bracket E={lo:.4f} already transmits")
    for _ in range(40):
        if ok(hi):
            break
        lo = hi
        hi *= 1.05
    else:
        raise BracketError("no transmitting energy found while expanding the bracket")

    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def excited_sphaleron_probe(E: float, N: float, params: Optional[ModelParams] = None,
                            n_phi: int = 64, x_start: float = -14.0,
                            t_max: float = 400.0):
    """Longest-lingering shot near the transmission boundary.

    Returns the dense solution of the deepest-penetrating phase at (E, N),
    useful for inspecting the oscillating intermediate state that mediates
    transmission at the boundary energy.
    """
    params = params or ModelParams()
    _, phi = _transmits(E, N, params, n_phi, x_start, t_max)
    return shoot(ShotSpec(E=E, N=N, phi=phi, x_start=x_start, t_max=t_max),
                 params, dense=True), phi


def tint_phase_scan(E: float, N: float, params: Optional[ModelParams] = None,
                    n_phi: int = 128, x_start: float = -14.0,
                    t_max: float = 400.0):
    """T_int of transmitted shots versus oscillator phase.

    Returns (phis, T_ints (nan where not transmitted), phi_star, t_int_min)
    where phi_star minimizes T_int over the transmitted window (refined by
    golden-section).  On the classically allowed side of the boundary the
    minimizing phase is the one the eps -> 0 saddle family selects.
    """
    params = params or ModelParams()
    phis = np.linspace(0.0, 2.0 * np.pi, n_phi, endpoint=False)
    tints = np.full(n_phi, np.nan)
    for i, phi in enumerate(phis):
        res = shoot(ShotSpec(E=E, N=N, phi=phi, x_start=x_start, t_max=t_max), params)
        if res.outcome is Outcome.TRANSMITTED:
            tints[i] = res.T_int
    if not np.any(np.isfinite(tints)):
        raise BracketError("no transmitted phase at this (E, N)")
    k = int(np.nanargmin(tints))
    dphi = 2.0 * np.pi / n_phi

    def neg_tint(phi):
        res = shoot(ShotSpec(E=E, N=N, phi=phi, x_start=x_start, t_max=t_max), params)
        if res.outcome is not Outcome.TRANSMITTED:
            return -np.inf
        return -res.T_int

    phi_star, neg_best = _golden_max(neg_tint, phis[k] - dphi, phis[k] + dphi, tol=1e-5)
    return phis, tints, float(phi_star % (2.0 * np.pi)), float(-neg_best)
