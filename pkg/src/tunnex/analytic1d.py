"""Exactly solvable one-dimensional barrier: V(X) = 1/cosh^2(X).

Closed-form complex-time solutions of this model are the ground truth
against which the numerical boundary-value machinery is checked.  The
barrier-phase regularization ``U -> exp(-i eps) U`` is available in all
closed forms.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

__all__ = [
    "BranchLabel",
    "Branch1D",
    "exact_T_of_E",
    "branch_points",
    "wkb_exponent",
    "exact_solution_1d",
    "trajectory_on_path",
    "sphaleron_family_solution",
    "imag_t0",
    "re_t0_pinned",
    "fig6_branches",
    "potential_1d",
]


class BranchLabel(enum.Enum):
    TUNNELING_FORBIDDEN = "tunneling_forbidden"
    ALLOWED_TRANSMISSION = "allowed_transmission"
    REFLECTION_ALLOWED = "reflection_allowed"
    REFLECTION_FORBIDDEN = "reflection_forbidden"
    SPHALERON_FAMILY = "sphaleron_family"


@dataclass(frozen=True)
class Branch1D:
    """A point (E, T_half) on one of the five solution branches."""

    label: BranchLabel
    T_half: float
    E: float


def potential_1d(X, eps: float = 0.0):
    """Barrier potential ``exp(-i eps)/cosh^2 X`` (complex-safe)."""
    return np.exp(-1j * eps) / np.cosh(np.asarray(X, dtype=complex)) ** 2


def exact_T_of_E(E: float, eps: float = 0.0) -> float:
    """Contour height T of the transmitting branch at energy E.

    T = (2/sqrt(2E)) * (pi + arg(exp(-i eps) - E)), with the principal
    value of arg in (-pi, pi].  For eps = 0 and E < 1 this reduces to
    T = 2 pi / sqrt(2E); for E > 1 it collapses to O(eps).
    """
    if E <= 0:
        raise ValueError("E must be positive")
    if eps < 0:
        raise ValueError("eps must be >= 0")
    return 2.0 / np.sqrt(2.0 * E) * (np.pi + np.angle(np.exp(-1j * eps) - E))


def imag_t0(E: float, eps: float = 0.0) -> float:
    """Im t0 making the solution real on the initial horizontal segment."""
    T = exact_T_of_E(E, eps)
    return T / 2.0 - np.angle(np.exp(-1j * eps) - E) / (2.0 * np.sqrt(2.0 * E))


def re_t0_pinned(E: float, c: float, eps: float = 0.0) -> float:
    """Re t0 pinning the left branch point at Re t = -c."""
    if E <= 0:
        raise ValueError("E must be positive")
    return (
        np.log((1.0 + np.sqrt(E)) / np.sqrt(abs(1.0 - E))) / np.sqrt(2.0 * E) - c
    )


def branch_points(E: float, t0: complex = 0.0) -> tuple[complex, complex]:
    """Branch points t*(-), t*(+) of the eps = 0 tunneling solution (n = 0).

    Only defined in the forbidden region 0 < E < 1; the regularized
    positions for eps > 0 are given by :func:`branch_points_regularized`.
    """
    if not 0.0 < E < 1.0:
        raise ValueError("branch points in this form require 0 < E < 1")
    mag = np.log((1.0 + np.sqrt(E)) / np.sqrt(1.0 - E))
    base = 1j * np.pi / 2.0
    scale = 1.0 / np.sqrt(2.0 * E)
    t_minus = t0 + scale * (-mag + base)
    t_plus = t0 + scale * (mag + base)
    return t_minus, t_plus


def branch_points_regularized(
    E: float, eps: float, t0: complex = 0.0, n: int = 0
) -> tuple[complex, complex]:
    """Branch points of the regularized solution, sheet n."""
    if E <= 0:
        raise ValueError("E must be positive")
    rE = np.sqrt(E)
    phase = np.exp(-1j * eps / 2.0)
    scale = 1.0 / np.sqrt(2.0 * E)
    out = []
    for sign in (-1.0, +1.0):
        val = scale * (
            1j * np.pi * n
            + 1j * np.pi / 2.0
            + 1j * np.angle(phase + sign * rE)
            + sign * np.log(abs((rE + phase) / np.sqrt(np.exp(-1j * eps) - E)))
        )
        out.append(t0 + val)
    return out[0], out[1]


def wkb_exponent(E: float) -> float:
    """Barrier-penetration exponent 2 * int sqrt(2(V - E)) dX.

    The turning points X = +-arccosh(1/sqrt(E)) carry an integrable
    square-root singularity; it is removed by the substitution
    X = X_t - u^2 before adaptive quadrature.
    """
    if E <= 0:
        raise ValueError("E must be positive")
    if E >= 1.0:
        return 0.0
    x_t = np.arccosh(1.0 / np.sqrt(E))

    def integrand(u):
        x = x_t - u * u
        return 2.0 * u * np.sqrt(2.0 * max(1.0 / np.cosh(x) ** 2 - E, 0.0))

    # Even integrand in X: twice the [0, x_t] half.
    half, err = quad(integrand, 0.0, np.sqrt(x_t), limit=200, epsabs=1e-13)
    return float(4.0 * half)


def _sinh_rhs(E: float, eps: float, t, t0: complex):
    amp = np.sqrt((np.exp(-1j * eps) - E) / E + 0j)
    return -amp * np.cosh(np.sqrt(2.0 * E) * (np.asarray(t) - t0))


def _asinh_candidates(w: complex, kmax: int = 2):
    x0 = np.arcsinh(w)
    for k in range(-kmax, kmax + 1):
        yield x0 + 2j * np.pi * k
        yield 1j * np.pi - x0 + 2j * np.pi * k


def exact_solution_1d(E: float, eps: float, t: complex, t0: complex) -> complex:
    """Principal-branch value of the tunneling solution at a single time.

    Solves sinh X = -sqrt((exp(-i eps) - E)/E) cosh(sqrt(2E)(t - t0)) with
    the principal arcsinh.  For branch-consistent values along a path use
    :func:`trajectory_on_path`.
    """
    if E <= 0:
        raise ValueError("E must be positive")
    w = _sinh_rhs(E, eps, t, t0)
    if np.any(np.abs(np.asarray(w) ** 2 + 1.0) < 1e-14):
        raise ValueError("evaluation at a branch point")
    return np.arcsinh(w)


def trajectory_on_path(
    E: float, eps: float, times: np.ndarray, t0: complex
) -> np.ndarray:
    """Branch-tracked solution values along an ordered path of times.

    The arcsinh branch is selected by continuity, starting from the
    principal branch at the first point (assumed to lie in the real
    asymptotic region, where X is real and negative).
    """
    times = np.asarray(times)
    w = _sinh_rhs(E, eps, times, t0)
    if np.any(np.abs(w**2 + 1.0) < 1e-14):
        raise ValueError("path passes through a branch point")
    X = np.empty(len(times), dtype=complex)
    X[0] = np.arcsinh(w[0])
    for k in range(1, len(times)):
        prev = X[k - 1]
        cands = np.array(list(_asinh_candidates(w[k])))
        X[k] = cands[np.argmin(np.abs(cands - prev))]
    return X


def sphaleron_family_solution(t, T: float, c: float = 0.0) -> np.ndarray:
    """Member of the zero-suppression family sinh X = -exp(-sqrt2 (t - iT/2 + c)).

    These solutions exist at E = 1 for any intermediate 0 < T < pi*sqrt(2);
    they approach the barrier top X -> 0 as t -> +infinity.
    """
    w = -np.exp(-np.sqrt(2.0) * (np.asarray(t) - 1j * T / 2.0 + c))
    return np.arcsinh(w)


def fig6_branches(
    e_forbidden: np.ndarray | None = None,
    e_allowed: np.ndarray | None = None,
    n_family: int = 21,
) -> list[Branch1D]:
    """The five (E, T/2) solution branches of the sech^2 model."""
    if e_forbidden is None:
        e_forbidden = np.linspace(0.2, 0.999, 60)
    if e_allowed is None:
        e_allowed = np.linspace(1.001, 2.0, 60)
    out: list[Branch1D] = []
    for E in e_forbidden:
        out.append(Branch1D(BranchLabel.TUNNELING_FORBIDDEN, np.pi / np.sqrt(2 * E), E))
    for E in e_allowed:
        out.append(Branch1D(BranchLabel.ALLOWED_TRANSMISSION, 0.0, E))
    for E in e_allowed:
        out.append(Branch1D(BranchLabel.REFLECTION_ALLOWED, np.pi / np.sqrt(2 * E), E))
    for E in e_forbidden:
        out.append(Branch1D(BranchLabel.REFLECTION_FORBIDDEN, 0.0, E))
    for Th in np.linspace(0.0, np.pi / np.sqrt(2.0), n_family):
        out.append(Branch1D(BranchLabel.SPHALERON_FAMILY, Th, 1.0))
    return out
