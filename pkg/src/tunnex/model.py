"""Rescaled two-degree-of-freedom oscillator-barrier model.

The system is an oscillator of frequency ``omega`` in the relative
coordinate ``y`` riding on the center-of-mass coordinate ``X``, which hits
a Gaussian barrier of unit height.  In the rescaled units used throughout
this package the potential is

    V(X, y) = omega^2 y^2 / 2 + exp(-i*eps) * exp(-(X+y)^2 / 2),

where ``eps >= 0`` is a small complex-rotation of the barrier term that
removes solutions lingering forever on top of the barrier.  All functions
accept complex coordinates; the potential is entire.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ModelParams",
    "SphaleronModes",
    "potential_2d",
    "barrier_term",
    "force_2d",
    "force_jacobian_2d",
    "hamiltonian_2d",
    "sphaleron_modes",
    "project_to_modes",
    "modes_to_coords",
]


@dataclass(frozen=True)
class ModelParams:
    """Physical constants of the rescaled model.

    Parameters
    ----------
    omega : float
        Oscillator frequency, of order one.
    epsilon : float
        Barrier phase-rotation parameter; must be the smallest scale in
        the problem (enforced ``epsilon < 0.1``).
    """

    omega: float = 0.5
    epsilon: float = 0.0

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")
        if self.epsilon >= 0.1:
            raise ValueError(
                f"epsilon must stay the smallest parameter (< 0.1), got {self.epsilon}"
            )

    def with_epsilon(self, epsilon: float) -> "ModelParams":
        return ModelParams(omega=self.omega, epsilon=epsilon)


@dataclass(frozen=True)
class SphaleronModes:
    """Normal-mode data of the potential at the saddle (X, y) = (0, 0).

    ``omega_plus_sq`` is the squared frequency of the stable mode,
    ``omega_minus_sq`` the magnitude of the unstable one: the Hessian
    eigenvalues are ``omega_plus_sq`` and ``-omega_minus_sq``.  ``alpha``
    is the rotation angle from (X, y) to the mode coordinates (c+, c-).
    """

    alpha: float
    omega_plus_sq: float
    omega_minus_sq: float


def barrier_term(X, y, params: ModelParams):
    """Barrier potential ``exp(-i eps) exp(-(X+y)^2/2)`` (complex-safe)."""
    s = np.asarray(X) + np.asarray(y)
    return np.exp(-1j * params.epsilon) * np.exp(-0.5 * s * s)


def potential_2d(X, y, params: ModelParams):
    """Full rescaled potential; barrier height is 1 at the saddle for eps=0."""
    y = np.asarray(y)
    return 0.5 * params.omega**2 * y * y + barrier_term(X, y, params)


def force_2d(X, y, params: ModelParams):
    """Forces ``(-dV/dX, -dV/dy)`` at (possibly complex) coordinates."""
    s = np.asarray(X) + np.asarray(y)
    fb = s * np.exp(-1j * params.epsilon) * np.exp(-0.5 * s * s)
    return fb, -params.omega**2 * np.asarray(y) + fb


def force_jacobian_2d(X, y, params: ModelParams):
    """Derivatives of the forces, as (dFX/dX, dFX/dy, dFy/dX, dFy/dy).

    dFX/dX = dFX/dy = dFy/dX = (1 - s^2) * barrier, with s = X + y; the
    oscillator adds -omega^2 to dFy/dy only.
    """
    s = np.asarray(X) + np.asarray(y)
    g = (1.0 - s * s) * np.exp(-1j * params.epsilon) * np.exp(-0.5 * s * s)
    return g, g, g, g - params.omega**2


def hamiltonian_2d(X, y, pX, py, params: ModelParams):
    """Conserved energy ``pX^2/2 + py^2/2 + V(X, y)``."""
    return 0.5 * (np.asarray(pX) ** 2 + np.asarray(py) ** 2) + potential_2d(X, y, params)


def _hessian_at_saddle(omega: float) -> np.ndarray:
    # d2/dX2 = -1, d2/dXdy = -1, d2/dy2 = omega^2 - 1 at the origin.
    return np.array([[-1.0, -1.0], [-1.0, omega**2 - 1.0]])


def sphaleron_modes(omega: float) -> SphaleronModes:
    """Eigen-decomposition of the potential Hessian at the saddle.

    The eigenvalues are ``-1 + omega^2/2 +- sqrt(1 + omega^4/4)``; the
    positive one is the stable squared frequency, the negative one (in
    magnitude) the unstable squared frequency.  The angle ``alpha`` is
    chosen so that the c- axis is the unstable direction.
    """
    if not omega > 0:
        raise ValueError("omega must be positive")
    hess = _hessian_at_saddle(omega)
    evals, evecs = np.linalg.eigh(hess)
    # eigh sorts ascending: evals[0] < 0 < evals[1] for this saddle.
    lam_minus, lam_plus = evals
    v_minus = evecs[:, 0]  # unstable direction
    v_plus = evecs[:, 1]
    # Rotation X = cos(a) c+ + sin(a) c-, y = -sin(a) c+ + cos(a) c-:
    # the c+ basis vector is (cos a, -sin a), the c- one (sin a, cos a).
    alpha = float(np.arctan2(v_minus[0], v_minus[1]))
    # Keep alpha in (-pi/2, pi/2] and the basis right-handed.
    if alpha > np.pi / 2:
        alpha -= np.pi
    elif alpha <= -np.pi / 2:
        alpha += np.pi
    del v_plus
    return SphaleronModes(
        alpha=alpha,
        omega_plus_sq=float(lam_plus),
        omega_minus_sq=float(-lam_minus),
    )


def project_to_modes(X, y, modes: SphaleronModes):
    """Coordinates (c+, c-) in the rotated saddle-mode basis."""
    ca, sa = np.cos(modes.alpha), np.sin(modes.alpha)
    X = np.asarray(X)
    y = np.asarray(y)
    c_plus = ca * X - sa * y
    c_minus = sa * X + ca * y
    return c_plus, c_minus


def modes_to_coords(c_plus, c_minus, modes: SphaleronModes):
    """Inverse of :func:`project_to_modes`."""
    ca, sa = np.cos(modes.alpha), np.sin(modes.alpha)
    X = ca * np.asarray(c_plus) + sa * np.asarray(c_minus)
    y = -sa * np.asarray(c_plus) + ca * np.asarray(c_minus)
    return X, y
