"""Physical observables of converged saddle solutions and their checks.

The suppression exponent of the inclusive transmission probability at fixed
energy E and incoming occupation N is evaluated on the saddle as

    F = 2 Im S0 - E T - N theta,

where T and theta are the Lagrange multipliers (contour height and boost)
and S0 is the integrated-by-parts action along the contour.  E and N follow
from the free-motion amplitudes on the incoming segment,

    E = p0^2 / 2 + omega N,      N = u v,

both real for a trajectory satisfying the boundary conditions.  The
anharmonicity time

    T_int = Re  int_contour dt  exp(-(X + y)^2 / 2)

(the regularization-response integral) obeys dF_eps/d eps = 2 T_int along a
family of saddles at fixed (T, theta).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .contour import Contour, contour_action, contour_action_1d
from .model import ModelParams
from .types import BranchPath, SaddleSolution, Trajectory

__all__ = [
    "Observables",
    "EpsFamily",
    "compute_observables",
    "occupation_number",
    "interaction_time",
    "legendre_check",
    "eps_derivative_check",
    "extrapolate_eps",
    "incoming_oscillator_phase",
]


@dataclass(frozen=True)
class Observables:
    """Scalar observables of one saddle solution."""

    E: float
    N: float
    F: float
    T_int: float
    im_S0: float
    im_E: float
    im_N: float


def occupation_number(u: complex, v: complex) -> complex:
    """Incoming oscillator occupation N = u v.

    For amplitudes linked by the boost condition v = e^theta conj(u) this is
    e^theta |u|^2, manifestly real and non-negative.
    """
    return u * v


def interaction_time(
    traj: Trajectory, contour: Contour, params: ModelParams
) -> float:
    """Anharmonicity time T_int = Re int dt exp(-(X+y)^2/2) along the contour.

    The conjugate-trajectory term of the defining symmetric combination
    equals the complex conjugate of the direct term (the conjugate solution
    lives on the mirrored contour), so the sum is twice the real part.
    """
    s = traj.X + traj.y
    integral = contour.integrate(np.exp(-0.5 * s * s))
    return float(integral.real)


def compute_observables(
    traj: Trajectory,
    contour: Contour,
    T: float,
    theta: float,
    params: ModelParams,
) -> Observables:
    """Evaluate (E, N, F, T_int) for a fitted trajectory.

    ``traj`` must already carry the free-motion amplitudes (filled by the
    solver after convergence).  The imaginary parts of E and N are returned
    as diagnostics; they vanish up to discretization error on a true saddle.
    """
    n_c = occupation_number(traj.u, traj.v)
    e_c = 0.5 * traj.p0**2 + params.omega * n_c
    s0 = contour_action(traj.X, traj.y, contour, params)
    f = 2.0 * s0.imag - e_c.real * T - n_c.real * theta
    t_int = interaction_time(traj, contour, params)
    return Observables(
        E=float(e_c.real),
        N=float(n_c.real),
        F=float(f),
        T_int=t_int,
        im_S0=float(s0.imag),
        im_E=float(e_c.imag),
        im_N=float(n_c.imag),
    )


def compute_observables_1d(
    traj: Trajectory, contour: Contour, T: float, eps: float
) -> Observables:
    """Observables for the single-coordinate barrier: E = p0^2/2, F = 2 Im S0 - E T."""
    e_c = 0.5 * traj.p0**2
    s0 = contour_action_1d(traj.X, contour, eps)
    f = 2.0 * s0.imag - e_c.real * T
    t_int = float(contour.integrate(1.0 / np.cosh(traj.X) ** 2).real)
    return Observables(
        E=float(e_c.real),
        N=0.0,
        F=float(f),
        T_int=t_int,
        im_S0=float(s0.imag),
        im_E=float(e_c.imag),
        im_N=0.0,
    )


# ---------------------------------------------------------------------------
# Legendre-transform consistency
# ---------------------------------------------------------------------------


def _central_slopes(path: BranchPath):
    """Central-difference d(E,N,F)/d(step) along a 3-point (or longer) path."""
    tab = path.table()
    if len(tab) < 3:
        raise ValueError("need at least three solutions for central differences")
    mid = len(tab) // 2
    lo, hi = tab[mid - 1], tab[mid + 1]
    return tab[mid], (hi - lo) / 2.0


def legendre_check(path_T: BranchPath, path_theta: BranchPath) -> dict:
    """Verify dF/dE = -T (fixed N) and dF/dN = -theta (fixed E) by differencing.

    Parameters
    ----------
    path_T, path_theta : BranchPath
        Short symmetric walks about a common central solution: the first
        varies T at fixed theta, the second varies theta at fixed T.  Each
        must hold eps fixed and contain an odd number (>= 3) of solutions.

    Returns
    -------
    dict with keys ``dF_dE`` (at fixed N), ``dF_dN`` (at fixed E), the
    central ``T`` and ``theta``, and the relative mismatches ``err_T``,
    ``err_theta``.

    Notes
    -----
    Walking in T at fixed theta changes both E and N, so the constrained
    derivatives follow from the 2x2 chain rule: with subscripts denoting
    the walk direction,

        dF/dE|_N = (F_T N_th - F_th N_T) / (E_T N_th - E_th N_T),
        dF/dN|_E = (F_th E_T - F_T E_th) / (N_th E_T - N_T E_th).
    """
    mid_T, dT = _central_slopes(path_T)
    mid_th, dth = _central_slopes(path_theta)
    if not np.allclose(mid_T[:3], mid_th[:3], atol=1e-9):
        raise ValueError("paths do not share a central solution")

    e_t, n_t, f_t = dT[3], dT[4], dT[5]
    e_h, n_h, f_h = dth[3], dth[4], dth[5]
    det = e_t * n_h - e_h * n_t
    df_de = (f_t * n_h - f_h * n_t) / det
    df_dn = (f_h * e_t - f_t * e_h) / det

    T0, theta0 = mid_T[0], mid_T[1]
    return {
        "T": T0,
        "theta": theta0,
        "dF_dE": df_de,
        "dF_dN": df_dn,
        "err_T": abs(df_de + T0) / max(abs(T0), 5e-2),
        "err_theta": abs(df_dn + theta0) / max(abs(theta0), 5e-2),
    }


def eps_derivative_check(path_eps: BranchPath) -> dict:
    """Verify dF/d eps at fixed (E, N) equals 2 T_int, via an eps path.

    The path holds the knobs (T, theta) fixed, so E and N drift with eps
    along it; the fixed-(E, N) derivative follows from the chain rule
    together with dF/dE = -T and dF/dN = -theta:

        dF/deps|_{E,N} = dF/deps|_path + T dE/deps + theta dN/deps.
    """
    mid, d = _central_slopes(path_eps)
    deps = (path_eps[len(path_eps) // 2 + 1].eps - path_eps[len(path_eps) // 2 - 1].eps) / 2.0
    df_deps = (d[5] + mid[0] * d[3] + mid[1] * d[4]) / deps
    t_int = mid[6]
    return {
        "eps": mid[2],
        "dF_deps": df_deps,
        "two_T_int": 2.0 * t_int,
        "err": abs(df_deps - 2.0 * t_int) / max(abs(2.0 * t_int), 1e-12),
    }


# ---------------------------------------------------------------------------
# eps -> 0 extrapolation
# ---------------------------------------------------------------------------


@dataclass
class EpsFamily:
    """Saddles at common physical knobs and a ladder of regularization eps."""

    solutions: list

    @property
    def eps(self) -> np.ndarray:
        return np.array([s.eps for s in self.solutions])

    def values(self, attr: str) -> np.ndarray:
        return np.array([getattr(s, attr) for s in self.solutions])


def extrapolate_eps(family: EpsFamily, degree: int = 1) -> dict:
    """Extrapolate (E, N, F) of an eps ladder to eps = 0 by a polynomial fit.

    The leading regularization response is linear (dF/d eps = 2 T_int stays
    finite), so a degree-1 fit in eps suffices for small ladders; pass
    ``degree=2`` when the ladder spans a wide eps range.  Returns the
    extrapolated values and an error estimate (difference between the
    degree and degree+1 fits at eps = 0).
    """
    eps = family.eps
    if len(eps) < degree + 1:
        raise ValueError("not enough family members for the requested degree")
    out = {}
    for attr in ("E", "N", "F"):
        vals = family.values(attr)
        coef = np.polyfit(eps, vals, degree)
        base = float(np.polyval(coef, 0.0))
        if len(eps) >= degree + 2:
            coef2 = np.polyfit(eps, vals, degree + 1)
            err = abs(float(np.polyval(coef2, 0.0)) - base)
        else:
            err = np.nan
        out[attr] = base
        out[attr + "_err"] = err
    return out


def incoming_oscillator_phase(sol: SaddleSolution, params: ModelParams,
                              x_ref: float = -14.0) -> float:
    """Oscillator phase of the incoming asymptotics, referenced at X = x_ref.

    The free incoming motion is X ~ X0 + p0 t and
    y ~ (u e^{-i w t} + v e^{i w t}) / sqrt(2 w); for a (nearly) real
    trajectory this is y = sqrt(2 N / w) cos(w t - arg u), which matches the
    classical launch convention y = sqrt(2 N / w) cos(phi) at the time the
    trajectory crosses x_ref.  Returns phi in [0, 2 pi).
    """
    p = sol.traj.p0.real
    if abs(p) < 1e-12:
        raise ValueError("incoming momentum vanishes; phase undefined")
    t_ref = (x_ref - sol.traj.X0.real) / p
    phi = params.omega * t_ref - np.angle(sol.traj.u)
    return float(np.mod(phi, 2.0 * np.pi))
