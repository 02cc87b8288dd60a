"""
Uniform confidence bands for Tikhonov estimators

Two constructions are offered: Gaussian approximation, with quantiles of norms
of a simulated Gaussian process, and concentration, with a Rademacher
symmetrized supremum plus an envelope term. The DKW band around the empirical
CDF is the well-posed baseline.
"""
import logging
import math
from typing import Literal, Optional

import numpy as np
from joblib import Parallel, delayed
from scipy import linalg

from config import MIN_GAUSS_DRAWS
from ..exceptions import (
    DegenerateBandError,
    DimensionMismatchError,
    EmptySampleError,
    InvalidGammaError,
    NonPositiveParameterError,
    NonPsdError,
    ProcessIndexError,
)
from ..state import (
    BandDiagnostics,
    BandRequest,
    ConfidenceBand,
    DiscreteOperator,
    Fit,
    Grid,
    GridFunction,
    ResidualMatrix,
)
from .grid import sup_norm
from .operators import operator_norm_2inf, resolvent_apply, tikhonov_solve

logger = logging.getLogger(__name__)

# draws are simulated in fixed blocks; block b always uses the stream (seed, b)
DRAW_BLOCK = 500


def _check_gamma(gamma: float) -> None:
    if not 0.0 < gamma < 1.0:
        raise InvalidGammaError(f"gamma must lie in (0, 1), got {gamma}")


def _check_alpha(alpha: float) -> None:
    if not alpha > 0:
        raise NonPositiveParameterError(f"alpha must be positive, got {alpha}")


def second_moment_matrix(values) -> np.ndarray:
    """(1/n) sum_i x_i x_i' over the rows of values."""
    values = np.asarray(values, dtype=float)
    return values.T @ values / values.shape[0]


def estimate_covariance(res: ResidualMatrix, center: bool = False) -> np.ndarray:
    """
    Covariance of the residual process, (1/n) sum_i X_i(g) X_i(g').

    Residual rows are mean zero in population and are used as they are. Rows
    that are plain summands of an estimated function, such as f(Y_i - z) in
    deconvolution, need center=True so the sample mean row is removed first.
    The result is symmetrized and projected onto the PSD cone by clipping
    negative eigenvalues at zero.

    Args:
        res: Residual rows on a grid
        center: Subtract the mean row before forming the second moment

    Returns:
        Symmetric PSD matrix of shape (m, m)
    """
    if res.n < 2:
        raise EmptySampleError(f"covariance estimate needs at least 2 rows, got {res.n}")
    values = res.values - res.mean_row() if center else res.values
    if not np.any(values):
        logger.warning("All residual rows are zero; covariance estimate is the zero matrix")
        return np.zeros((res.grid.m, res.grid.m))

    cov = second_moment_matrix(values)
    cov = 0.5 * (cov + cov.T)
    eigvals, eigvecs = linalg.eigh(cov)
    clipped = np.clip(eigvals, 0.0, None)
    projected = (eigvecs * clipped) @ eigvecs.T
    return 0.5 * (projected + projected.T)


def _path_factor(cov: np.ndarray) -> np.ndarray:
    cov = np.asarray(cov, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise DimensionMismatchError(f"covariance must be square, got shape {cov.shape}")
    eigvals, eigvecs = linalg.eigh(0.5 * (cov + cov.T))
    scale = max(1.0, float(np.max(np.abs(eigvals))))
    if eigvals.min() < -1e-8 * scale:
        raise NonPsdError(f"covariance has eigenvalue {eigvals.min():.3g}")
    return eigvecs * np.sqrt(np.clip(eigvals, 0.0, None))


def _norm_block(factor: np.ndarray, delta: float, norm_kind: str, seed: int, block: int, size: int) -> np.ndarray:
    rng = np.random.default_rng([seed, block])
    paths = rng.standard_normal((size, factor.shape[1])) @ factor.T
    if norm_kind == "l2_squared":
        return delta * np.sum(paths ** 2, axis=1)
    return np.max(np.abs(paths), axis=1)


def gaussian_quantile(
    cov,
    grid: Optional[Grid],
    norm_kind: Literal["l2_squared", "sup"],
    gamma: float,
    draws: int,
    seed: int,
    n_jobs: int = 1,
) -> float:
    """
    Empirical 1 - gamma quantile of a norm of the centered Gaussian process with covariance cov.

    Paths are G = L xi with L = V diag(sqrt(lambda)). The quantile does not
    depend on n_jobs.

    Args:
        cov: PSD covariance on the grid
        grid: Grid the process lives on; needed for the L2 norm
        norm_kind: "l2_squared" for delta * sum G^2, "sup" for max |G|
        gamma: Band level
        draws: Number of simulated paths
        seed: Seed of the draw streams
        n_jobs: joblib workers

    Returns:
        Quantile of the chosen norm
    """
    _check_gamma(gamma)
    if draws < MIN_GAUSS_DRAWS:
        raise NonPositiveParameterError(f"need at least {MIN_GAUSS_DRAWS} draws, got {draws}")
    if norm_kind not in ("l2_squared", "sup"):
        raise ValueError(f"unknown norm kind {norm_kind!r}")
    if norm_kind == "l2_squared" and grid is None:
        raise DimensionMismatchError("the L2 norm needs the grid spacing")

    factor = _path_factor(cov)
    if grid is not None and factor.shape[0] != grid.m:
        raise DimensionMismatchError(f"covariance is {factor.shape[0]}x{factor.shape[0]}, grid has {grid.m} points")
    delta = grid.delta if grid is not None else 1.0

    sizes = [min(DRAW_BLOCK, draws - start) for start in range(0, draws, DRAW_BLOCK)]
    blocks = Parallel(n_jobs=n_jobs)(
        delayed(_norm_block)(factor, delta, norm_kind, seed, b, size) for b, size in enumerate(sizes)
    )
    stats = np.concatenate(blocks)
    quantile = float(np.quantile(stats, 1.0 - gamma))
    logger.debug("Gaussian %s quantile %.6g from %d draws", norm_kind, quantile, draws)
    return quantile


def rademacher_average(values, seed: int) -> np.ndarray:
    """(1/n) sum_i eps_i row_i with one Rademacher vector drawn from seed."""
    values = np.asarray(values, dtype=float)
    rng = np.random.default_rng(seed)
    eps = rng.choice([-1.0, 1.0], size=values.shape[0])
    return eps @ values / values.shape[0]


def symmetrized_supremum(res: ResidualMatrix, op: DiscreteOperator, alpha: float, seed: int) -> float:
    """
    Sup-norm of the regularized image of the symmetrized residual process.

    Process 1 rows live on the instrument grid and go through the Tikhonov
    solve; process 2 rows live on the structural grid and go through the
    resolvent.
    """
    _check_alpha(alpha)
    g = rademacher_average(res.values, seed)
    if res.process_index == 1:
        if res.grid.m != op.grid_w.m:
            raise DimensionMismatchError("process 1 rows must live on the operator's image grid")
        image = tikhonov_solve(op, GridFunction(grid=op.grid_w, values=g), alpha)
    else:
        if res.grid.m != op.grid_z.m:
            raise DimensionMismatchError("process 2 rows must live on the operator's domain grid")
        image = resolvent_apply(op, GridFunction(grid=op.grid_z, values=g), alpha)
    return sup_norm(image)


def envelope_estimate(res: ResidualMatrix, norm_kind: Literal["l2", "sup"]) -> float:
    """Largest row norm; process 1 rows are divided by u_n first."""
    rows = res.values / res.u_n if res.process_index == 1 else res.values
    if norm_kind == "l2":
        return float(np.max(np.sqrt(res.grid.delta * np.sum(rows ** 2, axis=1))))
    return float(np.max(np.abs(rows)))


def gaussian_half_width(
    process_index: int,
    quantile: float,
    norm_2inf: float,
    alpha: float,
    n: int,
    c0: float = 0.0,
) -> float:
    """Half-width from a Gaussian quantile; process 1 takes the quantile of the squared L2 norm."""
    _check_alpha(alpha)
    root_n = math.sqrt(n)
    if process_index == 1:
        return (math.sqrt(quantile) * norm_2inf + c0) / (alpha * root_n)
    if process_index == 2:
        gain = norm_2inf / 2.0 + math.sqrt(alpha)
        return (quantile * gain + c0) / (alpha * math.sqrt(alpha) * root_n)
    raise ProcessIndexError(f"process index must be 1 or 2, got {process_index}")


def concentration_half_width(
    process_index: int,
    sym_supremum: float,
    norm_2inf: float,
    envelope: float,
    gamma: float,
    u_n: float,
    alpha: float,
    n: int,
    c0: float = 0.0,
) -> float:
    """Half-width from the symmetrized supremum and the envelope."""
    _check_gamma(gamma)
    _check_alpha(alpha)
    tail = math.sqrt(2.0 * math.log(2.0 / gamma))
    root_n = math.sqrt(n)
    if process_index == 1:
        return 2.0 * sym_supremum + (3.0 * norm_2inf * envelope * tail + c0) * u_n / (alpha * root_n)
    if process_index == 2:
        gain = norm_2inf / 2.0 + math.sqrt(alpha)
        return 2.0 * sym_supremum + (3.0 * gain * envelope * tail + c0) / (alpha * math.sqrt(alpha) * root_n)
    raise ProcessIndexError(f"process index must be 1 or 2, got {process_index}")


def build_band(fit: Fit, res: ResidualMatrix, req: BandRequest, n_jobs: int = 1) -> ConfidenceBand:
    """
    Uniform band around the fitted estimate.

    Args:
        fit: Fitted estimator
        res: Residual rows for the requested process
        req: Method, process, level and randomness
        n_jobs: joblib workers for the Gaussian draws

    Returns:
        ConfidenceBand with populated diagnostics
    """
    _check_gamma(req.gamma)
    if res.process_index != req.process_index:
        raise ProcessIndexError(
            f"residual rows are for process {res.process_index}, request asks for process {req.process_index}"
        )
    if fit.model == "deconv" and req.process_index != 2:
        raise ProcessIndexError("deconvolution bands use process 2")

    op = fit.operator
    norm_2inf = operator_norm_2inf(op)
    n = res.n

    if req.method == "gauss":
        # deconvolution rows are f(Y_i - z), not residuals
        center = fit.model == "deconv"
        cov = estimate_covariance(res, center=center)
        norm_kind = "l2_squared" if req.process_index == 1 else "sup"
        quantile = gaussian_quantile(cov, res.grid, norm_kind, req.gamma, req.gauss_draws, req.seed, n_jobs)
        half_width = gaussian_half_width(req.process_index, quantile, norm_2inf, fit.alpha, n, req.c0)
        diagnostics = BandDiagnostics(
            norm_2inf=norm_2inf,
            gauss_quantile=quantile,
            covariance_rows="centered" if center else "unscaled",
        )
    else:
        sym = symmetrized_supremum(res, op, fit.alpha, req.seed)
        if fit.known_envelope is not None:
            envelope = fit.known_envelope
        else:
            envelope = envelope_estimate(res, "l2" if req.process_index == 1 else "sup")
        half_width = concentration_half_width(
            req.process_index, sym, norm_2inf, envelope, req.gamma, res.u_n, fit.alpha, n, req.c0
        )
        diagnostics = BandDiagnostics(norm_2inf=norm_2inf, envelope=envelope, sym_supremum=sym)

    if not half_width > 0:
        raise DegenerateBandError(
            "band half-width is zero; residual rows carry no variation (zero envelope or covariance)"
        )

    logger.info(
        "Built %s band for process %d: half-width %.6g (alpha=%.4g, n=%d)",
        req.method, req.process_index, half_width, fit.alpha, n,
    )
    return ConfidenceBand.around(
        fit.phi_hat,
        half_width,
        method=req.method,
        gamma=req.gamma,
        n=n,
        process_index=req.process_index,
        alpha=fit.alpha,
        h=fit.h,
        seed=req.seed,
        request=req,
        diagnostics=diagnostics,
    )


def dkw_half_width(n: int, gamma: float) -> float:
    """sqrt(log(2/gamma) / (2n))."""
    _check_gamma(gamma)
    if n < 1:
        raise EmptySampleError("DKW band needs at least one observation")
    return math.sqrt(math.log(2.0 / gamma) / (2.0 * n))


def empirical_cdf(sample, points) -> np.ndarray:
    ordered = np.sort(np.asarray(sample, dtype=float))
    return np.searchsorted(ordered, np.asarray(points, dtype=float), side="right") / ordered.shape[0]


def dkw_band(sample, gamma: float, grid: Grid) -> ConfidenceBand:
    """Empirical CDF on the grid plus and minus the DKW half-width; not clipped to [0, 1]."""
    sample = np.asarray(sample, dtype=float)
    _check_gamma(gamma)
    if sample.ndim != 1 or sample.shape[0] < 1:
        raise EmptySampleError("DKW band needs at least one observation")
    n = int(sample.shape[0])
    ecdf = GridFunction(grid=grid, values=empirical_cdf(sample, grid.points))
    return ConfidenceBand.around(ecdf, dkw_half_width(n, gamma), method="dkw", gamma=gamma, n=n)


def covers(band: ConfidenceBand, truth) -> bool:
    """True when truth lies inside the band at every grid point."""
    truth = np.asarray(truth, dtype=float)
    return bool(np.all((truth >= band.lower.values) & (truth <= band.upper.values)))

