"""
Smoothing kernels, the joint kernel density estimator and the kernel regression numerator
"""
import logging

import numpy as np

from ..exceptions import DimensionMismatchError, EmptySampleError, NonPositiveParameterError
from ..state import Grid, GridFunction, KernelFamily, KernelSpec

logger = logging.getLogger(__name__)


def _epanechnikov(u: np.ndarray) -> np.ndarray:
    return np.where(np.abs(u) <= 1.0, 0.75 * (1.0 - u ** 2), 0.0)


# second-order kernels on [-1, 1], keyed by family
KERNELS = {
    KernelFamily.EPANECHNIKOV: _epanechnikov,
}


def kernel_eval(spec: KernelSpec, u):
    """
    Evaluate the kernel, rescaled to its support radius.

    Args:
        spec: Kernel family and support radius
        u: Scalar or array of arguments

    Returns:
        Kernel values, zero outside [-support_radius, support_radius]
    """
    base = KERNELS[spec.family]
    radius = spec.support_radius
    values = base(np.asarray(u, dtype=float) / radius) / radius
    if np.ndim(values) == 0:
        return float(values)
    return values


def _check_sample(h: float, *samples: np.ndarray) -> int:
    n = len(samples[0])
    if n == 0:
        raise EmptySampleError("kernel estimator needs at least one observation")
    if any(len(s) != n for s in samples):
        raise DimensionMismatchError("samples must have equal length")
    if not h > 0:
        raise NonPositiveParameterError(f"bandwidth must be positive, got {h}")
    return n


def kernel_matrix(spec: KernelSpec, sample, grid: Grid, h: float) -> np.ndarray:
    """Matrix K((X_i - x_j) / h) of shape (n, m)."""
    sample = np.asarray(sample, dtype=float)
    return kernel_eval(spec, (sample[:, None] - grid.points[None, :]) / h)


def kde_joint(
    z_sample,
    w_sample,
    h: float,
    grid_z: Grid,
    grid_w: Grid,
    spec: KernelSpec,
) -> np.ndarray:
    """
    Product-kernel estimate of the joint density with equal bandwidths.

    f(z_k, w_j) = 1/(n h^2) sum_i K((Z_i - z_k)/h) K((W_i - w_j)/h)

    Returns:
        Matrix of shape (m_z, m_w)
    """
    z_sample = np.asarray(z_sample, dtype=float)
    w_sample = np.asarray(w_sample, dtype=float)
    n = _check_sample(h, z_sample, w_sample)

    kz = kernel_matrix(spec, z_sample, grid_z, h)
    kw = kernel_matrix(spec, w_sample, grid_w, h)
    density = kz.T @ kw / (n * h ** 2)

    logger.debug("Joint KDE on %dx%d grid from %d observations, h=%.4g", grid_z.m, grid_w.m, n, h)
    return density


def kernel_numerator(y_sample, w_sample, h: float, grid_w: Grid, spec: KernelSpec) -> GridFunction:
    """Kernel regression numerator r(w_j) = 1/(n h) sum_i Y_i K((W_i - w_j)/h)."""
    y_sample = np.asarray(y_sample, dtype=float)
    w_sample = np.asarray(w_sample, dtype=float)
    n = _check_sample(h, y_sample, w_sample)

    kw = kernel_matrix(spec, w_sample, grid_w, h)
    return GridFunction(grid=grid_w, values=y_sample @ kw / (n * h))
