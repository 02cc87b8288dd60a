"""
Simulation designs and the Monte Carlo coverage harness
"""
import logging
from typing import Optional

import numpy as np
from joblib import Parallel, delayed
from scipy import linalg, stats

from config import (
    DECONV_LATENT_BOUND,
    DECONV_LATENT_SCALE,
    DECONV_NOISE_SCALE,
    PHI_SCALE_DENOM,
    RHO,
    SIGMA_U_SQ,
    SIGMA_W,
    SIGMA_Z,
    SIGMA_ZU,
)
from ..exceptions import DegenerateSampleError, NonPositiveParameterError, NonPsdError, TikbandError
from ..state import BandRequest, DeconvData, McConfig, McReport, NoiseDensity, NpivData
from .estimators import deconv_fit, npiv_fit, npiv_residuals
from .grid import make_uniform_grid
from .inference import build_band, covers

logger = logging.getLogger(__name__)

# observations drawn per rejection round, relative to the number still missing
_OVERSAMPLE = 1.1


def true_phi(z):
    """Structural function exp(-z^2 / 0.8)."""
    return np.exp(-np.asarray(z, dtype=float) ** 2 / PHI_SCALE_DENOM)


def dgp_covariance() -> np.ndarray:
    """Covariance of (Z, W, U)."""
    return np.array([
        [SIGMA_Z ** 2, RHO * SIGMA_Z * SIGMA_W, SIGMA_ZU],
        [RHO * SIGMA_Z * SIGMA_W, SIGMA_W ** 2, 0.0],
        [SIGMA_ZU, 0.0, SIGMA_U_SQ],
    ])


def _dgp_factor() -> np.ndarray:
    try:
        return linalg.cholesky(dgp_covariance(), lower=True)
    except linalg.LinAlgError as e:
        raise NonPsdError(f"data-generating covariance is not positive definite: {e}") from e


def dgp_draws(n: int, rng: np.random.Generator) -> np.ndarray:
    """n untruncated draws of (Z, W, U) as an (n, 3) array."""
    return rng.standard_normal((n, 3)) @ _dgp_factor().T


def simulate_npiv_dgp(
    n: int,
    truncation: float,
    seed: int,
    phi_scale: float = 1.0,
    noise_scale: float = 1.0,
) -> NpivData:
    """
    Draw n observations with |Z| and |W| inside the truncation interval.

    Rejected draws are replaced until exactly n are kept. Y = phi_scale * phi(Z) + noise_scale * U.

    Args:
        n: Number of kept observations
        truncation: Symmetric bound on |Z| and |W|
        seed: Generator seed
        phi_scale: Multiplier of the structural function
        noise_scale: Multiplier of the structural error

    Returns:
        NpivData of length n
    """
    if n < 2:
        raise DegenerateSampleError(f"need at least 2 observations, got {n}")
    if not truncation > 0:
        raise NonPositiveParameterError(f"truncation must be positive, got {truncation}")

    rng = np.random.default_rng(seed)
    kept = []
    missing = n
    while missing > 0:
        draws = dgp_draws(int(np.ceil(missing * _OVERSAMPLE)) + 8, rng)
        inside = draws[(np.abs(draws[:, 0]) <= truncation) & (np.abs(draws[:, 1]) <= truncation)]
        kept.append(inside[:missing])
        missing -= min(missing, inside.shape[0])
    zwu = np.concatenate(kept)

    z, w, u = zwu[:, 0], zwu[:, 1], noise_scale * zwu[:, 2]
    return NpivData(y=phi_scale * true_phi(z) + u, z=z, w=w)


def _latent_bounds():
    bound = DECONV_LATENT_BOUND / DECONV_LATENT_SCALE
    return -bound, bound


def true_deconv_density(z):
    """Density of N(0, 0.3^2) truncated to [-0.6, 0.6]."""
    lo, hi = _latent_bounds()
    return stats.truncnorm.pdf(np.asarray(z, dtype=float), lo, hi, loc=0.0, scale=DECONV_LATENT_SCALE)


def _epanechnikov_draws(n: int, rng: np.random.Generator) -> np.ndarray:
    # of three uniforms on [-1, 1], take the second when the third is the largest in magnitude
    u1, u2, u3 = rng.uniform(-1.0, 1.0, size=(3, n))
    take_second = (np.abs(u3) >= np.abs(u2)) & (np.abs(u3) >= np.abs(u1))
    return np.where(take_second, u2, u3)


def deconv_noise_density() -> NoiseDensity:
    return NoiseDensity(kind="epanechnikov", scale=DECONV_NOISE_SCALE)


def simulate_deconv_dgp(n: int, seed: int, grid_m: int = 100) -> DeconvData:
    """Y = Z + U with Z truncated normal and U Epanechnikov; the fit grid covers the latent support."""
    if n < 1:
        raise DegenerateSampleError(f"need at least 1 observation, got {n}")
    rng = np.random.default_rng(seed)
    lo, hi = _latent_bounds()
    z = stats.truncnorm.rvs(lo, hi, loc=0.0, scale=DECONV_LATENT_SCALE, size=n, random_state=rng)
    u = DECONV_NOISE_SCALE * _epanechnikov_draws(n, rng)
    return DeconvData(
        y=z + u,
        noise_density=deconv_noise_density(),
        grid_z=make_uniform_grid(-DECONV_LATENT_BOUND, DECONV_LATENT_BOUND, grid_m),
    )


def replication_seeds(master_seed: int, replication: int):
    """Independent (data, band) seeds for one replication."""
    data_seed, band_seed = np.random.SeedSequence([master_seed, replication]).generate_state(2)
    return int(data_seed), int(band_seed)


def _replicate(config: McConfig, replication: int) -> Optional[dict]:
    data_seed, band_seed = replication_seeds(config.master_seed, replication)
    try:
        if config.model == "deconv":
            data = simulate_deconv_dgp(config.n, data_seed, config.grid_m)
            fit = deconv_fit(data, config.alpha)
            res = fit.process_rows
            process_index = 2
            truth = true_deconv_density(fit.phi_hat.grid.points)
        else:
            grid = make_uniform_grid(-config.truncation, config.truncation, config.grid_m)
            data = simulate_npiv_dgp(
                config.n, config.truncation, data_seed, config.phi_scale, config.noise_scale
            )
            fit = npiv_fit(data, config.alpha, config.h, grid, grid, truncation=config.truncation)
            process_index = config.process_index
            res = npiv_residuals(fit, data, process_index, grid)
            truth = config.phi_scale * true_phi(grid.points)

        request = BandRequest(
            method=config.method,
            process_index=process_index,
            gamma=config.gamma,
            c0=config.c0,
            gauss_draws=config.gauss_draws,
            seed=band_seed,
        )
        band = build_band(fit, res, request)
    except TikbandError as e:
        logger.warning("Replication %d failed: %s", replication, e)
        return None

    return {
        "covered": covers(band, truth),
        "half_width": band.half_width,
        "sup_bias": float(np.max(np.abs(fit.phi_hat.values - truth))),
        "estimate": fit.phi_hat.values,
        "lower": band.lower.values,
        "upper": band.upper.values,
        "points": fit.phi_hat.grid.points,
        "truth": truth,
    }


def run_coverage(config: McConfig, n_jobs: int = 1) -> McReport:
    """
    Run the coverage experiment.

    Each replication draws its seeds from (master_seed, replication), so the
    report is identical for any n_jobs. Failed replications are excluded and
    counted.

    Args:
        config: Experiment settings
        n_jobs: joblib workers

    Returns:
        McReport with coverage, mean half-width, mean sup bias and averaged curves
    """
    outcomes = Parallel(n_jobs=n_jobs)(
        delayed(_replicate)(config, r) for r in range(config.replications)
    )
    done = [o for o in outcomes if o is not None]
    failed = len(outcomes) - len(done)
    if not done:
        raise DegenerateSampleError(f"all {failed} replications failed")

    coverage = sum(o["covered"] for o in done) / len(done)
    report = McReport(
        coverage=coverage,
        mean_half_width=float(np.mean([o["half_width"] for o in done])),
        mean_sup_bias=float(np.mean([o["sup_bias"] for o in done])),
        replications_used=len(done),
        replications_failed=failed,
        config=config,
        grid_points=done[0]["points"].tolist(),
        truth=done[0]["truth"].tolist(),
        mean_estimate=np.mean([o["estimate"] for o in done], axis=0).tolist(),
        mean_lower=np.mean([o["lower"] for o in done], axis=0).tolist(),
        mean_upper=np.mean([o["upper"] for o in done], axis=0).tolist(),
    )
    logger.info(
        "Coverage %.3f over %d replications (%d failed), mean half-width %.4g",
        report.coverage, report.replications_used, failed, report.mean_half_width,
    )
    return report
