import math

import numpy as np
import pytest

from config import MC_PRESETS
from src.exceptions import DegenerateSampleError
from src.state import McConfig
from src.utils import (
    dgp_covariance,
    make_uniform_grid,
    run_coverage,
    simulate_deconv_dgp,
    simulate_npiv_dgp,
    true_deconv_density,
    true_phi,
)
from src.utils.simulation import _epanechnikov_draws, dgp_draws, replication_seeds


def test_true_phi():
    assert true_phi(0.0) == pytest.approx(1.0)
    assert true_phi(math.sqrt(0.8)) == pytest.approx(math.exp(-1.0))
    assert true_phi(50.0) == pytest.approx(0.0)


def test_dgp_covariance_is_positive_definite():
    cov = dgp_covariance()
    assert np.linalg.det(cov) == pytest.approx(7.713e-5, rel=1e-3)
    assert np.linalg.eigvalsh(cov).min() > 0.0


def test_dgp_moments():
    draws = dgp_draws(100_000, np.random.default_rng(12))
    assert np.corrcoef(draws[:, 0], draws[:, 1])[0, 1] == pytest.approx(0.30, abs=0.01)
    assert np.cov(draws[:, 0], draws[:, 2])[0, 1] == pytest.approx(0.04, abs=0.005)


def test_simulated_sample_is_truncated_and_reproducible():
    data = simulate_npiv_dgp(500, 0.5, seed=4)
    assert data.n == 500
    assert np.all(np.abs(data.z) <= 0.5)
    assert np.all(np.abs(data.w) <= 0.5)
    again = simulate_npiv_dgp(500, 0.5, seed=4)
    assert np.array_equal(data.y, again.y)


def test_noiseless_and_zero_signal_variants():
    noiseless = simulate_npiv_dgp(100, 1.0, seed=2, noise_scale=0.0)
    np.testing.assert_allclose(noiseless.y, true_phi(noiseless.z))
    flat = simulate_npiv_dgp(100, 1.0, seed=2, phi_scale=0.0)
    full = simulate_npiv_dgp(100, 1.0, seed=2)
    np.testing.assert_allclose(full.y - noiseless.y, flat.y, atol=1e-14)
    assert np.array_equal(flat.z, noiseless.z)


def test_simulation_needs_two_observations():
    with pytest.raises(DegenerateSampleError):
        simulate_npiv_dgp(1, 1.0, seed=0)


def test_epanechnikov_sampler_moments():
    draws = _epanechnikov_draws(100_000, np.random.default_rng(3))
    assert np.all(np.abs(draws) <= 1.0)
    assert draws.mean() == pytest.approx(0.0, abs=0.01)
    assert draws.var() == pytest.approx(0.2, abs=0.01)


def test_deconvolution_design():
    data = simulate_deconv_dgp(2000, seed=6, grid_m=50)
    assert data.n == 2000
    assert np.all(np.abs(data.y) <= 0.9 + 1e-12)
    grid = make_uniform_grid(-0.6, 0.6, 2000)
    assert grid.delta * true_deconv_density(grid.points).sum() == pytest.approx(1.0, abs=1e-4)


def test_replication_seeds_differ():
    assert replication_seeds(0, 0) != replication_seeds(0, 1)
    assert replication_seeds(3, 5) == replication_seeds(3, 5)


def _small_config(**overrides):
    settings = dict(
        n=300, replications=4, alpha=0.14, h=1.0, gamma=0.05, method="gauss",
        grid_m=30, gauss_draws=200, master_seed=7,
    )
    settings.update(overrides)
    return McConfig(**settings)


def test_coverage_run_is_reproducible():
    config = _small_config()
    first = run_coverage(config)
    second = run_coverage(config)
    assert first.model_dump_json(indent=2) == second.model_dump_json(indent=2)
    assert first.replications_used == 4
    assert first.replications_failed == 0
    assert first.coverage in (0.0, 0.25, 0.5, 0.75, 1.0)
    assert len(first.mean_estimate) == 30


def test_coverage_run_independent_of_workers():
    config = _small_config(method="concentration")
    assert run_coverage(config, n_jobs=1).model_dump_json() == run_coverage(config, n_jobs=2).model_dump_json()


def test_report_json_omits_curves():
    report = run_coverage(_small_config(replications=2))
    payload = report.model_dump()
    assert set(payload) == {
        "coverage", "mean_half_width", "mean_sup_bias", "replications_used", "replications_failed", "config",
    }


def test_deconvolution_coverage_run():
    report = run_coverage(_small_config(model="deconv", alpha=0.05, replications=3))
    assert report.replications_used == 3
    assert report.mean_half_width > 0
    assert report.grid_points[0] == pytest.approx(-0.6 + 0.6 / 30)


@pytest.mark.slow
def test_zero_signal_coverage_at_published_tuning():
    preset = MC_PRESETS["fig1a"]
    config = McConfig(replications=200, gamma=0.05, phi_scale=0.0, master_seed=1, **preset)
    report = run_coverage(config, n_jobs=2)
    assert report.coverage >= 0.90
    assert 0.0 < report.mean_half_width < 1.5


@pytest.mark.slow
def test_concentration_band_wider_than_gaussian():
    gauss = run_coverage(McConfig(replications=200, gamma=0.05, master_seed=2, **MC_PRESETS["fig1a"]), n_jobs=2)
    conc = run_coverage(McConfig(replications=200, gamma=0.05, master_seed=2, **MC_PRESETS["fig2a"]), n_jobs=2)
    assert conc.mean_half_width > gauss.mean_half_width


@pytest.mark.slow
def test_mean_half_width_larger_at_smaller_gamma():
    preset = MC_PRESETS["fig1a"]
    strict = run_coverage(McConfig(replications=50, gamma=0.05, master_seed=3, **preset), n_jobs=2)
    loose = run_coverage(McConfig(replications=50, gamma=0.32, master_seed=3, **preset), n_jobs=2)
    assert strict.mean_half_width > loose.mean_half_width
    assert 0.0 < strict.mean_half_width < 1.5


@pytest.mark.slow
@pytest.mark.parametrize("phi_scale", [1.0, 0.5])
def test_band_keeps_coverage_when_signal_is_halved(phi_scale):
    # fig1a tuning with c0 = 3 so the band also absorbs the regularization bias;
    # with c0 = 0 the sup error (about 0.2) exceeds the half-width (about 0.04)
    config = McConfig(
        replications=200, gamma=0.05, c0=3.0, phi_scale=phi_scale, master_seed=4, **MC_PRESETS["fig1a"]
    )
    report = run_coverage(config, n_jobs=2)
    assert report.replications_used >= 190
    assert report.coverage >= 0.95 - 0.05
