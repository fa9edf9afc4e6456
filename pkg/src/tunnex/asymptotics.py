"""Free-motion fits on the incoming part of the contour.

On the initial horizontal segment the interaction term is exponentially
small, so the coordinates follow free motion,

    X(t) ~ X0 + p0 t,
    y(t) ~ (u e^{-i w t} + v e^{+i w t}) / sqrt(2 w),

with t the real part of the contour time.  Both fits are linear least
squares, so the extracted amplitudes are fixed linear combinations of the
node values.  The combination weights depend only on the contour geometry
and the oscillator frequency; they are precomputed once per contour and
reused both when evaluating boundary conditions and when assembling their
(exact) Jacobian rows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .contour import Contour
from .errors import AsymptoticsNotFree


@dataclass(frozen=True)
class FitWeights:
    """Least-squares extraction weights on the incoming fit window.

    ``X0 = wx0 @ X[idx]``, ``p0 = wp0 @ X[idx]`` (real weights) and
    ``u = wu @ y[idx]``, ``v = wv @ y[idx]`` (complex weights, analytic in
    the node values).  ``design_x`` / ``design_y`` are the corresponding
    design matrices, kept for residual evaluation.
    """

    idx: np.ndarray
    wx0: np.ndarray
    wp0: np.ndarray
    wu: np.ndarray
    wv: np.ndarray
    design_x: np.ndarray
    design_y: np.ndarray


def fit_window(contour: Contour, frac: float = 0.2, min_nodes: int = 8) -> np.ndarray:
    """Node indices of the incoming fit window (earliest part of segment AB)."""
    m = max(min_nodes, int(round(frac * contour.n_ab)))
    m = min(m, max(contour.n_ab - 2, min_nodes))
    return np.arange(m)


def build_fit_weights(contour: Contour, omega: float) -> FitWeights:
    """Precompute least-squares weights for the free-motion fit."""
    idx = fit_window(contour)
    tau = contour.nodes[idx].real

    # X ~ X0 + p0 tau: real design matrix, pseudo-inverse rows are the weights.
    design_x = np.column_stack([np.ones_like(tau), tau])
    pinv_x = np.linalg.pinv(design_x)

    # y ~ u e^{-i w tau}/sqrt(2w) + v e^{+i w tau}/sqrt(2w): complex design,
    # the solution is complex-linear (no conjugations) in the node values.
    root = np.sqrt(2.0 * omega)
    design_y = np.column_stack(
        [np.exp(-1j * omega * tau) / root, np.exp(1j * omega * tau) / root]
    )
    pinv_y = np.linalg.pinv(design_y)

    return FitWeights(
        idx=idx,
        wx0=pinv_x[0],
        wp0=pinv_x[1],
        wu=pinv_y[0],
        wv=pinv_y[1],
        design_x=design_x,
        design_y=design_y,
    )


def apply_fit(
    weights: FitWeights,
    X: np.ndarray,
    y: np.ndarray | None,
    max_residual: float = 1e-4,
    check: bool = False,
):
    """Extract (X0, p0, u, v, residual) from node values using cached weights.

    Parameters
    ----------
    check : bool
        When True, raise :class:`AsymptoticsNotFree` if the relative RMS
        misfit on the fit window exceeds ``max_residual``.
    """
    idx = weights.idx
    xw = X[idx]
    X0 = complex(weights.wx0 @ xw)
    p0 = complex(weights.wp0 @ xw)
    res_x = np.linalg.norm(xw - weights.design_x @ np.array([X0, p0]))

    if y is not None:
        yw = y[idx]
        u = complex(weights.wu @ yw)
        v = complex(weights.wv @ yw)
        res_y = np.linalg.norm(yw - weights.design_y @ np.array([u, v]))
        scale = max(np.linalg.norm(xw), np.linalg.norm(yw), 1e-30)
        residual = float(np.hypot(res_x, res_y) / scale)
    else:
        u = 0.0 + 0.0j
        v = 0.0 + 0.0j
        scale = max(np.linalg.norm(xw), 1e-30)
        residual = float(res_x / scale)

    if check and residual > max_residual:
        raise AsymptoticsNotFree(
            f"free-motion fit residual {residual:.3e} exceeds {max_residual:.1e}; "
            "move t_left further out"
        )
    return X0, p0, u, v, residual
