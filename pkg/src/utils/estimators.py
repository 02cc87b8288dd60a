"""
Tikhonov-regularized estimators for nonparametric IV regression, functional
linear/IV regression and density deconvolution, plus their residual processes
"""
import logging
from typing import Optional

import numpy as np

from ..exceptions import (
    DegenerateSampleError,
    DimensionMismatchError,
    NonPositiveParameterError,
    ProcessIndexError,
)
from ..state import (
    DeconvData,
    Fit,
    FunRegData,
    Grid,
    GridFunction,
    KernelSpec,
    NpivData,
    ResidualMatrix,
)
from .grid import evaluate_at
from .kernels import kde_joint, kernel_eval, kernel_matrix, kernel_numerator
from .operators import operator_from_kernel, resolvent_apply, tikhonov_solve

logger = logging.getLogger(__name__)

# rows of the plug-in density are formed in blocks to bound memory at large n
_DENSITY_BLOCK = 512


def _check_positive(name: str, value: float) -> None:
    if not value > 0:
        raise NonPositiveParameterError(f"{name} must be positive, got {value}")


def truncate_npiv(data: NpivData, bound: float) -> NpivData:
    """Keep observations with |Z| <= bound and |W| <= bound."""
    keep = (np.abs(data.z) <= bound) & (np.abs(data.w) <= bound)
    if keep.sum() < 2:
        raise DegenerateSampleError(f"only {int(keep.sum())} observations inside [-{bound}, {bound}]")
    return NpivData(y=data.y[keep], z=data.z[keep], w=data.w[keep])


def _kept_mask(data: NpivData, truncation: Optional[float], grid_z: Grid, grid_w: Grid) -> np.ndarray:
    keep = (data.z >= grid_z.a) & (data.z <= grid_z.b) & (data.w >= grid_w.a) & (data.w <= grid_w.b)
    if truncation is not None:
        keep &= (np.abs(data.z) <= truncation) & (np.abs(data.w) <= truncation)
    return keep


def npiv_fit(
    data: NpivData,
    alpha: float,
    h: float,
    grid_z: Grid,
    grid_w: Grid,
    spec: KernelSpec = KernelSpec(),
    truncation: Optional[float] = None,
) -> Fit:
    """
    Fit the Tikhonov-regularized NPIV estimator.

    Observations outside the grids (and outside [-truncation, truncation] when
    given) are dropped first. The operator is built from the joint kernel
    density, the right-hand side from the kernel regression numerator.

    Args:
        data: Sample (Y, Z, W)
        alpha: Regularization parameter
        h: Bandwidth shared by both coordinates
        grid_z: Grid for the structural function
        grid_w: Grid for the instrument
        spec: Smoothing kernel
        truncation: Optional symmetric bound on |Z| and |W|

    Returns:
        Fit with residuals U_i = Y_i - phi_hat(Z_i) and u_n = 1/h
    """
    _check_positive("alpha", alpha)
    _check_positive("bandwidth", h)

    keep = _kept_mask(data, truncation, grid_z, grid_w)
    y, z, w = data.y[keep], data.z[keep], data.w[keep]
    if y.shape[0] < 2:
        raise DegenerateSampleError(f"only {y.shape[0]} observations inside the grids")
    if np.ptp(w) == 0:
        raise DegenerateSampleError("all instrument values are identical")

    r_hat = kernel_numerator(y, w, h, grid_w, spec)
    f_hat = kde_joint(z, w, h, grid_z, grid_w, spec)
    op = operator_from_kernel(f_hat, grid_z, grid_w)
    phi_hat = tikhonov_solve(op, r_hat, alpha)
    u_hat = y - evaluate_at(phi_hat, z)

    logger.info("NPIV fit on %d of %d observations, alpha=%.4g, h=%.4g", y.shape[0], data.n, alpha, h)
    return Fit(
        model="npiv",
        phi_hat=phi_hat,
        operator=op,
        r_hat=r_hat,
        normal_rhs=op.adjoint_apply(r_hat.values),
        residuals_u=u_hat,
        alpha=alpha,
        h=h,
        u_n=1.0 / h,
        truncation=truncation,
    )


def _density_rows(z: np.ndarray, w: np.ndarray, grid: Grid, h: float, spec: KernelSpec) -> np.ndarray:
    """Rows f_hat(z_k, W_i) of the plug-in joint density, shape (n, m)."""
    n = z.shape[0]
    kz = kernel_matrix(spec, z, grid, h)
    rows = np.empty((n, grid.m))
    for start in range(0, n, _DENSITY_BLOCK):
        stop = min(start + _DENSITY_BLOCK, n)
        kw = kernel_eval(spec, (w[:, None] - w[None, start:stop]) / h)
        rows[start:stop] = kw.T @ kz
    return rows / (n * h ** 2)


def npiv_process_rows(
    u_hat,
    z,
    w,
    h: float,
    grid: Grid,
    process_index: int,
    spec: KernelSpec = KernelSpec(),
) -> ResidualMatrix:
    """
    Residual process rows for NPIV.

    Process 1: U_i h^-1 K((W_i - w)/h) on the instrument grid.
    Process 2: f_hat(z, W_i) U_i on the structural grid.
    """
    if process_index not in (1, 2):
        raise ProcessIndexError(f"process index must be 1 or 2, got {process_index}")
    u_hat = np.asarray(u_hat, dtype=float)
    z = np.asarray(z, dtype=float)
    w = np.asarray(w, dtype=float)
    if not (u_hat.shape == z.shape == w.shape):
        raise DimensionMismatchError("residuals, z and w must have equal length")
    _check_positive("bandwidth", h)

    if process_index == 1:
        rows = u_hat[:, None] * kernel_matrix(spec, w, grid, h) / h
        return ResidualMatrix(values=rows, grid=grid, process_index=1, u_n=1.0 / h)
    rows = _density_rows(z, w, grid, h, spec) * u_hat[:, None]
    return ResidualMatrix(values=rows, grid=grid, process_index=2, u_n=1.0)


def npiv_residuals(
    fit: Fit,
    data: NpivData,
    process_index: int,
    grid: Grid,
    spec: KernelSpec = KernelSpec(),
) -> ResidualMatrix:
    """Residual process matrix for a fitted NPIV model on the observations the fit kept."""
    if process_index not in (1, 2):
        raise ProcessIndexError(f"process index must be 1 or 2, got {process_index}")
    keep = _kept_mask(data, fit.truncation, fit.operator.grid_z, fit.operator.grid_w)
    if int(keep.sum()) != fit.residuals_u.shape[0]:
        raise DimensionMismatchError("data does not match the sample the fit was computed on")
    return npiv_process_rows(fit.residuals_u, data.z[keep], data.w[keep], fit.h, grid, process_index, spec)


def funreg_fit(data: FunRegData, alpha: float) -> Fit:
    """
    Fit the functional linear (W = Z) or functional IV regression.

    r(s) = 1/n sum_i Y_i W_i(s), k(t, s) = 1/n sum_i Z_i(t) W_i(s). Residuals
    U_i = Y_i - int phi(t) Z_i(t) dt, process rows U_i W_i(s).
    """
    _check_positive("alpha", alpha)
    n = data.n
    r_hat = GridFunction(grid=data.grid_s, values=data.y @ data.w_curves / n)
    k_hat = data.z_curves.T @ data.w_curves / n
    op = operator_from_kernel(k_hat, data.grid_t, data.grid_s)
    phi_hat = tikhonov_solve(op, r_hat, alpha)
    u_hat = data.y - data.grid_t.delta * (data.z_curves @ phi_hat.values)
    rows = ResidualMatrix(values=u_hat[:, None] * data.w_curves, grid=data.grid_s, process_index=1, u_n=1.0)

    logger.info("Functional regression fit on %d curves, alpha=%.4g", n, alpha)
    return Fit(
        model="funreg",
        phi_hat=phi_hat,
        operator=op,
        r_hat=r_hat,
        normal_rhs=op.adjoint_apply(r_hat.values),
        residuals_u=u_hat,
        alpha=alpha,
        u_n=1.0,
        process_rows=rows,
    )


def deconv_fit(data: DeconvData, alpha: float) -> Fit:
    """
    Fit the deconvolution estimator with known error density f.

    The operator has kernel f(y - z) on grid_z x grid_z; the only estimated
    piece is s(z) = 1/n sum_i f(Y_i - z). The estimate is unconstrained and may
    be negative.
    """
    _check_positive("alpha", alpha)
    grid = data.grid_z
    f = data.noise_density
    pts = grid.points

    kernel = f(pts[None, :] - pts[:, None])
    op = operator_from_kernel(kernel, grid, grid)
    rows = f(data.y[:, None] - pts[None, :])
    s_hat = rows.mean(axis=0)
    phi_hat = resolvent_apply(op, GridFunction(grid=grid, values=s_hat), alpha)

    logger.info("Deconvolution fit on %d observations, alpha=%.4g", data.n, alpha)
    return Fit(
        model="deconv",
        phi_hat=phi_hat,
        operator=op,
        normal_rhs=s_hat,
        residuals_u=np.empty(0),
        alpha=alpha,
        u_n=1.0,
        process_rows=ResidualMatrix(values=rows, grid=grid, process_index=2, u_n=1.0),
        known_envelope=f.sup,
    )


def normal_equation_gap(fit: Fit) -> float:
    """sup |(alpha I + K'K) phi_hat - rhs|, relative to sup |rhs|."""
    k = fit.operator.matrix
    lhs = fit.alpha * fit.phi_hat.values + k.T @ (k @ fit.phi_hat.values)
    scale = float(np.max(np.abs(fit.normal_rhs)))
    gap = float(np.max(np.abs(lhs - fit.normal_rhs)))
    return gap / scale if scale > 0 else gap
