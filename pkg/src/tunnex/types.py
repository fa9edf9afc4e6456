"""Shared result containers for the saddle-point solver.

These are plain data holders so that the solver, the observable layer and
the CLI can exchange results without import cycles.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .contour import Contour


class Topology(Enum):
    """Endpoint classification of a saddle trajectory on the final real segment."""

    TRANSMISSION = "Transmission"
    REFLECTION = "Reflection"
    SPHALERON_BOUND = "SphaleronBound"


@dataclass
class Trajectory:
    """Complexified trajectory sampled on a contour, plus free-motion amplitudes.

    Attributes
    ----------
    X : ndarray of complex
        Unbound coordinate at each contour node.
    y : ndarray of complex or None
        Oscillator coordinate at each contour node (None for the
        single-coordinate reference problem).
    X0, p0 : complex
        Intercept and momentum of the linear fit ``X ~ X0 + p0 t`` on the
        incoming part of the initial segment.
    u, v : complex
        Negative/positive-frequency oscillator amplitudes from the fit
        ``y ~ (u e^{-i w t} + v e^{+i w t}) / sqrt(2 w)`` on the same window.
    fit_residual : float
        RMS misfit of the free-motion fit, normalized by the RMS of the data.
    """

    X: np.ndarray
    y: Optional[np.ndarray] = None
    X0: complex = 0.0 + 0.0j
    p0: complex = 0.0 + 0.0j
    u: complex = 0.0 + 0.0j
    v: complex = 0.0 + 0.0j
    fit_residual: float = np.nan

    def copy(self) -> "Trajectory":
        return Trajectory(
            X=self.X.copy(),
            y=None if self.y is None else self.y.copy(),
            X0=self.X0,
            p0=self.p0,
            u=self.u,
            v=self.v,
            fit_residual=self.fit_residual,
        )


@dataclass
class SaddleSolution:
    """Converged saddle point of the transmission rate functional."""

    traj: Trajectory
    contour: Contour
    T: float
    theta: float
    eps: float
    E: float
    N: float
    F: float
    T_int: float
    topology: Optional[Topology]
    residual_norm: float
    newton_iters: int


@dataclass
class BranchPath:
    """Ordered record of a continuation walk along a saddle branch."""

    solutions: list = field(default_factory=list)

    def append(self, sol: SaddleSolution) -> None:
        self.solutions.append(sol)

    def __len__(self) -> int:
        return len(self.solutions)

    def __getitem__(self, i):
        return self.solutions[i]

    @property
    def last(self) -> SaddleSolution:
        return self.solutions[-1]

    def table(self) -> np.ndarray:
        """Stack (T, theta, eps, E, N, F, T_int) rows for plotting/export."""
        return np.array(
            [[s.T, s.theta, s.eps, s.E, s.N, s.F, s.T_int] for s in self.solutions]
        )
