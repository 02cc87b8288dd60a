"""
Grids, Riemann quadrature and the sup, L2 and mixed (2, inf) norms
"""
import logging

import numpy as np

from ..exceptions import DimensionMismatchError, InvalidGridError
from ..state import Grid, GridFunction

logger = logging.getLogger(__name__)


def make_uniform_grid(a: float, b: float, m: int) -> Grid:
    """
    Build the midpoint grid a + (k - 1/2) * delta, k = 1..m, with delta = (b - a) / m.

    Args:
        a: Left endpoint
        b: Right endpoint
        m: Number of points (at least 2)

    Returns:
        Grid on [a, b]
    """
    if not a < b:
        raise InvalidGridError(f"grid bounds must satisfy a < b, got a={a}, b={b}")
    if int(m) != m or m < 2:
        raise InvalidGridError(f"grid needs an integer count of at least 2 points, got {m}")
    return Grid(a=float(a), b=float(b), m=int(m))


def grid_function(grid: Grid, func) -> GridFunction:
    """Tabulate a vectorized callable on the grid points."""
    return GridFunction(grid=grid, values=func(grid.points))


def sup_norm(f: GridFunction) -> float:
    return float(np.max(np.abs(f.values)))


def l2_norm(f: GridFunction) -> float:
    """Riemann L2 norm sqrt(delta * sum f^2)."""
    return float(np.sqrt(f.grid.delta * np.sum(f.values ** 2)))


def mixed_norm_2inf(kernel_values: np.ndarray, grid_w: Grid) -> float:
    """
    Mixed norm sup_z (int |k(z, w)|^2 dw)^(1/2) of a kernel tabulated as (z_k, w_j).

    For an integral operator this equals the (2, inf) norm of its adjoint.
    """
    kernel_values = np.asarray(kernel_values, dtype=float)
    if kernel_values.ndim != 2 or kernel_values.shape[1] != grid_w.m:
        raise DimensionMismatchError(
            f"kernel has shape {kernel_values.shape}, expected {grid_w.m} columns"
        )
    row_norms = np.sqrt(grid_w.delta * np.sum(kernel_values ** 2, axis=1))
    return float(np.max(row_norms))


def evaluate_at(f: GridFunction, x) -> np.ndarray:
    """Linear interpolation between grid points, constant beyond the first and last point."""
    return np.interp(np.asarray(x, dtype=float), f.grid.points, f.values)
