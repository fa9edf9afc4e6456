"""Complex-time integration contour and stencils on it.

The contour runs A -> B -> C -> D: horizontally at Im t = T/2 from
``t_left + iT/2`` to ``iT/2`` (segment AB), vertically down to the origin
(segment BC), then along the real axis to ``t_right`` (segment CD).
Corner nodes are shared, so the node count is ``n_ab + n_bc + n_cd + 1``.

Quadrature is trapezoidal along the complex path; differentiation uses the
three-point (quadratic interpolant) stencil, which stays valid across the
corners because the sampled trajectories are analytic in t.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import ModelParams, barrier_term

__all__ = ["Contour", "build_contour", "contour_action", "contour_action_1d"]


@dataclass(frozen=True)
class Contour:
    T: float
    t_left: float
    t_right: float
    n_ab: int
    n_bc: int
    n_cd: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    # Second-derivative stencil: f''[k] = sum_j c2[k, j] * f[idx2[k, j]]
    idx2: np.ndarray = field(repr=False)
    c2: np.ndarray = field(repr=False)
    # First-derivative stencil with the same index layout.
    c1: np.ndarray = field(repr=False)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def i_b(self) -> int:
        """Index of corner B (= iT/2)."""
        return self.n_ab

    @property
    def i_c(self) -> int:
        """Index of corner C (= 0)."""
        return self.n_ab + self.n_bc

    def second_derivative(self, f: np.ndarray) -> np.ndarray:
        return np.einsum("kj,kj->k", self.c2, f[self.idx2])

    def first_derivative(self, f: np.ndarray) -> np.ndarray:
        return np.einsum("kj,kj->k", self.c1, f[self.idx2])

    def integrate(self, f: np.ndarray) -> complex:
        return complex(np.dot(self.weights, f))

    def segment_of(self, k: int) -> str:
        if k < self.i_b:
            return "AB"
        if k < self.i_c:
            return "BC"
        return "CD"


def _quadratic_stencils(nodes: np.ndarray):
    """Per-node 3-point first/second derivative coefficients."""
    n = len(nodes)
    idx2 = np.empty((n, 3), dtype=int)
    c2 = np.empty((n, 3), dtype=complex)
    c1 = np.empty((n, 3), dtype=complex)
    for k in range(n):
        j0 = min(max(k - 1, 0), n - 3)
        idx = np.array([j0, j0 + 1, j0 + 2])
        t = nodes[idx]
        tk = nodes[k]
        for m in range(3):
            others = [p for p in range(3) if p != m]
            denom = (t[m] - t[others[0]]) * (t[m] - t[others[1]])
            c2[k, m] = 2.0 / denom
            c1[k, m] = ((tk - t[others[0]]) + (tk - t[others[1]])) / denom
        idx2[k] = idx
    return idx2, c2, c1


def build_contour(
    T: float,
    t_left: float = -25.0,
    t_right: float = 25.0,
    n_ab: int = 512,
    n_bc: int = 32,
    n_cd: int = 512,
) -> Contour:
    """Discretize the A-B-C-D path with uniform spacing per segment."""
    if T < 0:
        raise ValueError("T must be >= 0")
    if not (t_left < 0 < t_right):
        raise ValueError("need t_left < 0 < t_right")
    if n_ab < 64 or n_cd < 64:
        raise ValueError("n_ab and n_cd must be >= 64")
    if T == 0:
        if n_bc not in (0,) and n_bc < 16:
            raise ValueError("n_bc must be 0 or >= 16 when T = 0")
    elif n_bc < 16:
        raise ValueError("n_bc must be >= 16 for T > 0")

    top = 1j * T / 2.0
    ab = t_left + top + np.arange(n_ab) / n_ab * (0.0 - t_left)
    if n_bc > 0:
        bc = top - np.arange(n_bc) / n_bc * top
    else:
        bc = np.empty(0, dtype=complex)
    cd = np.linspace(0.0, t_right, n_cd + 1).astype(complex)
    nodes = np.concatenate([ab, bc, cd])

    weights = np.zeros(len(nodes), dtype=complex)
    dt = np.diff(nodes)
    weights[:-1] += dt / 2.0
    weights[1:] += dt / 2.0

    idx2, c2, c1 = _quadratic_stencils(nodes)
    return Contour(
        T=T,
        t_left=t_left,
        t_right=t_right,
        n_ab=n_ab,
        n_bc=n_bc,
        n_cd=n_cd,
        nodes=nodes,
        weights=weights,
        idx2=idx2,
        c2=c2,
        c1=c1,
    )


def contour_action(
    X: np.ndarray, y: np.ndarray, contour: Contour, params: ModelParams
) -> complex:
    """Integrated-by-parts action of a sampled (X, y) trajectory.

    S0 = int dt [ -X X''/2 - y y''/2 - omega^2 y^2 / 2 - U_int ].
    """
    if len(X) != contour.n_nodes or len(y) != contour.n_nodes:
        raise ValueError("trajectory length does not match contour")
    Xpp = contour.second_derivative(X)
    ypp = contour.second_derivative(y)
    integrand = (
        -0.5 * X * Xpp
        - 0.5 * y * ypp
        - 0.5 * params.omega**2 * y * y
        - barrier_term(X, y, params)
    )
    return contour.integrate(integrand)


def contour_action_1d(X: np.ndarray, contour: Contour, eps: float = 0.0) -> complex:
    """Same as :func:`contour_action` for the 1D sech^2 barrier."""
    if len(X) != contour.n_nodes:
        raise ValueError("trajectory length does not match contour")
    Xpp = contour.second_derivative(X)
    U = np.exp(-1j * eps) / np.cosh(X) ** 2
    return contour.integrate(-0.5 * X * Xpp - U)
