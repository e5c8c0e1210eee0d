"""Deterministic numerical kernels: RK4, spectral radius, ridge solve, local extrema."""

import logging
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from app.exceptions import (
    DivergenceError,
    InvalidRescaleError,
    SingularSystemError,
    SpectralRadiusError,
)
from app.models.series import ExtremaKind, ExtremaSeries, Trajectory

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class VectorField:
    """Autonomous right-hand side x' = rhs(x) on R^dimension."""

    dimension: int
    rhs: Callable[[np.ndarray], np.ndarray]

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.rhs(x)


def rk4_step(f: VectorField, x: np.ndarray, tau: float, step_index: int = 0) -> np.ndarray:
    """Classical fourth-order Runge-Kutta update."""
    k1 = f(x)
    k2 = f(x + 0.5 * tau * k1)
    k3 = f(x + 0.5 * tau * k2)
    k4 = f(x + tau * k3)
    x_next = x + (tau / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(x_next)):
        raise DivergenceError(step_index)
    return x_next


def integrate(f: VectorField, x0: np.ndarray, tau: float, n_steps: int) -> Trajectory:
    """Iterate rk4_step n_steps times; the result holds n_steps + 1 samples."""
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if tau <= 0:
        raise ValueError("tau must be > 0")
    x = np.asarray(x0, dtype=float)
    if x.shape != (f.dimension,):
        raise ValueError(f"initial state has shape {x.shape}, expected ({f.dimension},)")

    states = np.empty((n_steps + 1, f.dimension))
    states[0] = x
    for i in range(n_steps):
        try:
            x = rk4_step(f, x, tau, step_index=i + 1)
        except DivergenceError as e:
            partial = Trajectory(states[: i + 1].copy(), tau)
            raise DivergenceError(e.step_index, partial) from e
        states[i + 1] = x
    return Trajectory(states, tau)


def spectral_radius(M: np.ndarray) -> float:
    """Largest eigenvalue modulus from a dense eigensolve."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if M.size == 0:
        return 0.0
    try:
        eigenvalues = linalg.eigvals(M, check_finite=True)
    except linalg.LinAlgError as e:
        raise SpectralRadiusError(f"eigenvalue computation did not converge: {e}") from e
    return float(np.max(np.abs(eigenvalues)))


def rescale_to_radius(M: np.ndarray, rho_target: float) -> np.ndarray:
    """Scale M so its spectral radius equals rho_target."""
    if rho_target < 0:
        raise ValueError("rho_target must be nonnegative")
    M = np.asarray(M, dtype=float)
    if rho_target == 0:
        return np.zeros_like(M)
    radius = spectral_radius(M)
    if radius == 0:
        raise InvalidRescaleError("cannot rescale a matrix with spectral radius 0")
    return (rho_target / radius) * M


def solve_ridge(X: np.ndarray, Y: np.ndarray, beta: float) -> np.ndarray:
    """W = Y X^T (X X^T + beta I)^-1 via a Cholesky solve of the symmetric system."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if X.shape[1] != Y.shape[1] or X.shape[1] < 1:
        raise ValueError(f"column counts differ or are empty: X {X.shape}, Y {Y.shape}")
    if beta < 0:
        raise ValueError("beta must be nonnegative")

    gram = X @ X.T
    gram[np.diag_indices_from(gram)] += beta
    rhs = X @ Y.T
    try:
        factor = linalg.cho_factor(gram, lower=True, check_finite=True)
    except linalg.LinAlgError as e:
        rank = int(np.linalg.matrix_rank(gram))
        raise SingularSystemError(rank=rank, size=gram.shape[0]) from e
    return linalg.cho_solve(factor, rhs).T


def local_extrema(
    series: np.ndarray,
    kind: ExtremaKind = ExtremaKind.MAXIMA,
    companion: np.ndarray | None = None,
    coordinate_index: int = 0,
) -> ExtremaSeries:
    """Strict three-point extrema with parabolic refinement of the values.

    The companion series (if given) is interpolated on the same parabola
    offset, so it reports the second coordinate at the refined extremum time.
    """
    s = np.asarray(series, dtype=float)
    if s.ndim != 1 or s.size < 3:
        raise ValueError("series must be one-dimensional with at least 3 samples")
    c = s if companion is None else np.asarray(companion, dtype=float)

    left, mid, right = s[:-2], s[1:-1], s[2:]
    if kind is ExtremaKind.MAXIMA:
        mask = (mid > left) & (mid > right)
    else:
        mask = (mid < left) & (mid < right)
    idx = np.nonzero(mask)[0] + 1

    y0, y1, y2 = s[idx - 1], s[idx], s[idx + 1]
    curvature = y0 - 2.0 * y1 + y2
    offset = 0.5 * (y0 - y2) / curvature
    values = y1 - 0.25 * (y0 - y2) * offset

    c0, c1, c2 = c[idx - 1], c[idx], c[idx + 1]
    companion_values = c1 + 0.5 * offset * (c2 - c0) + 0.5 * offset**2 * (c0 - 2.0 * c1 + c2)

    return ExtremaSeries(
        kind=kind,
        coordinate_index=coordinate_index,
        times=idx,
        values=values,
        companion_values=companion_values,
    )
