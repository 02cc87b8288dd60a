"""
Discrete integral operators and the Tikhonov solver

The regularized inverse (alpha I + K'K)^-1 K' is computed from a Cholesky
factorization of the symmetric positive definite matrix alpha I + K'K.
"""
import logging

import numpy as np
from scipy import linalg

from ..exceptions import DimensionMismatchError, NonPositiveParameterError
from ..state import DiscreteOperator, Grid, GridFunction
from .grid import mixed_norm_2inf

logger = logging.getLogger(__name__)


def _check_alpha(alpha: float) -> None:
    if not alpha > 0:
        raise NonPositiveParameterError(f"alpha must be positive, got {alpha}")


def operator_from_kernel(kernel_values, grid_z: Grid, grid_w: Grid) -> DiscreteOperator:
    """
    Discretize the integral operator with kernel k(z, w).

    Args:
        kernel_values: Kernel tabulated as (m_z, m_w)
        grid_z: Grid of the unknown function
        grid_w: Grid of the image

    Returns:
        Operator with matrix[j, k] = k(z_k, w_j) * delta_z
    """
    kernel_values = np.asarray(kernel_values, dtype=float)
    if kernel_values.shape != (grid_z.m, grid_w.m):
        raise DimensionMismatchError(
            f"kernel has shape {kernel_values.shape}, expected {(grid_z.m, grid_w.m)}"
        )
    return DiscreteOperator(matrix=kernel_values.T * grid_z.delta, grid_z=grid_z, grid_w=grid_w)


def operator_norm_2inf(op: DiscreteOperator) -> float:
    """(2, inf) norm of the adjoint, via the mixed norm of the kernel."""
    return mixed_norm_2inf(op.kernel_values(), op.grid_w)


def _factor(op: DiscreteOperator, alpha: float):
    k = op.matrix
    gram = k.T @ k
    gram[np.diag_indices_from(gram)] += alpha
    return linalg.cho_factor(gram, lower=True, check_finite=False)


def tikhonov_solve(op: DiscreteOperator, r: GridFunction, alpha: float) -> GridFunction:
    """
    Tikhonov-regularized solution of K phi = r.

    Solves (alpha I + K'K) phi = K' r, the minimizer of alpha |phi|^2 + |K phi - r|^2.
    """
    _check_alpha(alpha)
    if r.grid.m != op.grid_w.m:
        raise DimensionMismatchError(f"right-hand side has {r.grid.m} points, operator image has {op.grid_w.m}")
    factor = _factor(op, alpha)
    phi = linalg.cho_solve(factor, op.adjoint_apply(r.values), check_finite=False)
    return GridFunction(grid=op.grid_z, values=phi)


def tikhonov_solve_dual(op: DiscreteOperator, r: GridFunction, alpha: float) -> GridFunction:
    """Same estimator in dual form K' (alpha I + K K')^-1 r."""
    _check_alpha(alpha)
    if r.grid.m != op.grid_w.m:
        raise DimensionMismatchError(f"right-hand side has {r.grid.m} points, operator image has {op.grid_w.m}")
    k = op.matrix
    outer = k @ k.T
    outer[np.diag_indices_from(outer)] += alpha
    factor = linalg.cho_factor(outer, lower=True, check_finite=False)
    phi = k.T @ linalg.cho_solve(factor, r.values, check_finite=False)
    return GridFunction(grid=op.grid_z, values=phi)


def resolvent_apply(op: DiscreteOperator, g: GridFunction, alpha: float) -> GridFunction:
    """Apply (alpha I + K'K)^-1 to a function on the operator's domain grid."""
    _check_alpha(alpha)
    if g.grid.m != op.grid_z.m:
        raise DimensionMismatchError(f"function has {g.grid.m} points, operator domain has {op.grid_z.m}")
    factor = _factor(op, alpha)
    return GridFunction(grid=op.grid_z, values=linalg.cho_solve(factor, g.values, check_finite=False))


def resolvent_sup_bound(norm_2inf: float, alpha: float) -> float:
    """Bound (norm_2inf/2 + alpha^(1/2)) / alpha^(3/2) on the sup-norm gain of the resolvent."""
    _check_alpha(alpha)
    root = float(np.sqrt(alpha))
    return (norm_2inf / 2.0 + root) / (alpha * root)
