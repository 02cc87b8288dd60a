import logging
import math

import numpy as np
import pytest

from src.exceptions import (
    DegenerateBandError,
    EmptySampleError,
    InvalidGammaError,
    NonPositiveParameterError,
    NonPsdError,
    ProcessIndexError,
)
from src.state import BandRequest, DiscreteOperator, GridFunction, NpivData, ResidualMatrix
from src.state.model_state import Fit
from src.utils import (
    build_band,
    deconv_fit,
    concentration_half_width,
    dkw_band,
    dkw_half_width,
    envelope_estimate,
    estimate_covariance,
    gaussian_half_width,
    gaussian_quantile,
    make_uniform_grid,
    npiv_fit,
    npiv_residuals,
    rademacher_average,
    resolvent_apply,
    simulate_deconv_dgp,
    sup_norm,
    symmetrized_supremum,
)
from src.utils.inference import empirical_cdf, second_moment_matrix


def _square_operator(matrix):
    grid = make_uniform_grid(0.0, 1.0, len(matrix))
    return DiscreteOperator(matrix=np.asarray(matrix, dtype=float), grid_z=grid, grid_w=grid)


def _plus_one_seed():
    return next(s for s in range(100) if np.random.default_rng(s).choice([-1.0, 1.0], size=1)[0] == 1.0)


def test_second_moment_of_single_row():
    row = np.array([1.0, -2.0, 0.5])
    np.testing.assert_allclose(second_moment_matrix(row[None, :]), np.outer(row, row))


def test_covariance_of_alternating_rows(unit_grid, rng):
    v = rng.standard_normal(unit_grid.m)
    rows = np.array([v if i % 2 == 0 else -v for i in range(10)])
    cov = estimate_covariance(ResidualMatrix(values=rows, grid=unit_grid, process_index=2))
    np.testing.assert_allclose(cov, np.outer(v, v), atol=1e-12)
    assert np.max(np.abs(cov - cov.T)) == 0.0
    assert np.linalg.eigvalsh(cov).min() >= -1e-12


def test_zero_rows_give_zero_covariance(unit_grid, caplog):
    res = ResidualMatrix(values=np.zeros((4, unit_grid.m)), grid=unit_grid, process_index=1)
    with caplog.at_level(logging.WARNING):
        cov = estimate_covariance(res)
    assert np.all(cov == 0.0)
    assert "zero" in caplog.text


def test_covariance_needs_two_rows(unit_grid):
    res = ResidualMatrix(values=np.ones((1, unit_grid.m)), grid=unit_grid, process_index=1)
    with pytest.raises(EmptySampleError):
        estimate_covariance(res)


def test_zero_covariance_has_zero_quantile(unit_grid):
    cov = np.zeros((unit_grid.m, unit_grid.m))
    assert gaussian_quantile(cov, unit_grid, "l2_squared", 0.05, 200, 0) == 0.0
    assert gaussian_quantile(cov, unit_grid, "sup", 0.05, 200, 0) == 0.0


def test_chi_square_quantile():
    grid = make_uniform_grid(0.0, 1.0, 10)
    quantile = gaussian_quantile(np.eye(10), grid, "l2_squared", 0.05, 100_000, 1)
    assert quantile == pytest.approx(1.8307, rel=0.03)


def test_standard_normal_quantile():
    quantile = gaussian_quantile(np.eye(1), None, "sup", 0.05, 100_000, 2)
    assert quantile == pytest.approx(1.96, rel=0.02)


def test_quantile_is_deterministic_across_workers(unit_grid, rng):
    a = rng.standard_normal((unit_grid.m, unit_grid.m))
    cov = a @ a.T / unit_grid.m
    first = gaussian_quantile(cov, unit_grid, "sup", 0.1, 1200, 9)
    assert gaussian_quantile(cov, unit_grid, "sup", 0.1, 1200, 9) == first
    assert gaussian_quantile(cov, unit_grid, "sup", 0.1, 1200, 9, n_jobs=2) == first


def test_quantile_preconditions(unit_grid):
    with pytest.raises(NonPsdError):
        gaussian_quantile(np.diag([1.0, -1.0]), None, "sup", 0.05, 200, 0)
    with pytest.raises(InvalidGammaError):
        gaussian_quantile(np.eye(2), None, "sup", 1.5, 200, 0)
    with pytest.raises(NonPositiveParameterError):
        gaussian_quantile(np.eye(2), None, "sup", 0.05, 50, 0)


def test_rademacher_average_single_row():
    row = np.array([[1.0, -3.0, 2.0]])
    np.testing.assert_allclose(rademacher_average(row, _plus_one_seed()), row[0])


def test_symmetrized_supremum_of_zero_rows(unit_grid):
    op = _square_operator(np.eye(unit_grid.m))
    res = ResidualMatrix(values=np.zeros((3, unit_grid.m)), grid=unit_grid, process_index=2)
    assert symmetrized_supremum(res, op, 0.1, 0) == 0.0


def test_symmetrized_supremum_single_term(rng):
    op = _square_operator(rng.standard_normal((4, 4)))
    row = rng.standard_normal(4)
    res = ResidualMatrix(values=row[None, :], grid=op.grid_z, process_index=2)
    expected = sup_norm(resolvent_apply(op, GridFunction(grid=op.grid_z, values=row), 0.3))
    assert symmetrized_supremum(res, op, 0.3, _plus_one_seed()) == pytest.approx(expected)


def test_symmetrized_supremum_matches_sign_enumeration(rng):
    op = _square_operator(rng.standard_normal((4, 4)))
    rows = rng.standard_normal((3, 4))
    res = ResidualMatrix(values=rows, grid=op.grid_z, process_index=2)
    signs = [np.array([a, b, c]) for a in (-1.0, 1.0) for b in (-1.0, 1.0) for c in (-1.0, 1.0)]
    outcomes = np.array([
        sup_norm(resolvent_apply(op, GridFunction(grid=op.grid_z, values=s @ rows / 3), 0.2)) for s in signs
    ])

    draws = np.array([symmetrized_supremum(res, op, 0.2, seed) for seed in range(2000)])
    assert all(np.min(np.abs(outcomes - d)) < 1e-10 for d in draws)
    assert draws.mean() == pytest.approx(outcomes.mean(), abs=0.05 * outcomes.max())


def test_envelope_estimate(unit_grid):
    zero = ResidualMatrix(values=np.zeros((2, unit_grid.m)), grid=unit_grid, process_index=2)
    assert envelope_estimate(zero, "sup") == 0.0
    const = ResidualMatrix(values=np.full((1, unit_grid.m), 2.0), grid=unit_grid, process_index=2)
    assert envelope_estimate(const, "sup") == pytest.approx(2.0)
    assert envelope_estimate(const, "l2") == pytest.approx(2.0)


def test_envelope_divides_by_scale(unit_grid, rng):
    rows = rng.standard_normal((5, unit_grid.m))
    plain = ResidualMatrix(values=rows, grid=unit_grid, process_index=1, u_n=1.0)
    scaled = ResidualMatrix(values=10.0 * rows, grid=unit_grid, process_index=1, u_n=10.0)
    assert envelope_estimate(scaled, "l2") == pytest.approx(envelope_estimate(plain, "l2"))


def test_gaussian_half_width_arithmetic():
    assert gaussian_half_width(1, 4.0, 1.0, 0.1, 100) == pytest.approx(2.0)
    expected = (1.5 * (0.5 + 0.5) + 0.2) / (0.25 * 0.5 * 10.0)
    assert gaussian_half_width(2, 1.5, 1.0, 0.25, 100, c0=0.2) == pytest.approx(expected)
    with pytest.raises(ProcessIndexError):
        gaussian_half_width(3, 1.0, 1.0, 0.1, 100)


def test_concentration_half_width_arithmetic():
    q = concentration_half_width(1, 0.05, 1.0, 0.5, 0.05, 1.0, 0.1, 100)
    assert q == pytest.approx(0.1 + 3 * 0.5 * math.sqrt(2 * math.log(40.0)), rel=1e-12)
    assert q == pytest.approx(4.1743, abs=1e-4)


def _fitted(npiv_sample, sym_grid, process):
    fit = npiv_fit(npiv_sample, 0.14, 1.0, sym_grid, sym_grid)
    return fit, npiv_residuals(fit, npiv_sample, process, sym_grid)


def test_band_geometry(npiv_sample, sym_grid):
    fit, res = _fitted(npiv_sample, sym_grid, 1)
    band = build_band(fit, res, BandRequest(method="gauss", process_index=1, gamma=0.05, gauss_draws=500, seed=4))
    np.testing.assert_allclose(band.upper.values - band.lower.values, 2 * band.half_width)
    np.testing.assert_allclose(band.upper.values + band.lower.values, 2 * band.estimate.values)
    assert band.diagnostics.gauss_quantile > 0
    assert band.diagnostics.covariance_rows == "unscaled"
    assert band.n == npiv_sample.n


@pytest.mark.parametrize("method", ["gauss", "concentration"])
@pytest.mark.parametrize("process", [1, 2])
def test_half_width_decreases_in_gamma(npiv_sample, sym_grid, method, process):
    fit, res = _fitted(npiv_sample, sym_grid, process)
    widths = [
        build_band(fit, res, BandRequest(
            method=method, process_index=process, gamma=gamma, gauss_draws=500, seed=8
        )).half_width
        for gamma in (0.01, 0.05, 0.10)
    ]
    assert widths[0] >= widths[1] >= widths[2]


def test_process_mismatch_rejected(npiv_sample, sym_grid):
    fit, res = _fitted(npiv_sample, sym_grid, 1)
    with pytest.raises(ProcessIndexError):
        build_band(fit, res, BandRequest(method="concentration", process_index=2, gamma=0.05))


@pytest.mark.parametrize("method", ["gauss", "concentration"])
def test_zero_residuals_give_degenerate_band(npiv_sample, sym_grid, method):
    data = NpivData(y=np.zeros(npiv_sample.n), z=npiv_sample.z, w=npiv_sample.w)
    fit = npiv_fit(data, 0.14, 1.0, sym_grid, sym_grid)
    res = npiv_residuals(fit, data, 2, sym_grid)
    with pytest.raises(DegenerateBandError):
        build_band(fit, res, BandRequest(method=method, process_index=2, gamma=0.05, gauss_draws=200))


def test_dkw_half_width_values():
    assert dkw_half_width(5000, 0.05) == pytest.approx(0.0192065, abs=1e-6)
    assert dkw_half_width(7, 2.0 / math.e) == pytest.approx(math.sqrt(1.0 / 14.0))
    assert dkw_half_width(2, 0.05) == pytest.approx(0.9603, abs=1e-4)
    with pytest.raises(InvalidGammaError):
        dkw_half_width(10, 0.0)


def test_dkw_band_around_ecdf(unit_grid):
    band = dkw_band([0.1, 0.5, 0.9], 0.1, unit_grid)
    np.testing.assert_allclose(band.estimate.values, empirical_cdf([0.1, 0.5, 0.9], unit_grid.points))
    assert band.method == "dkw"
    assert band.request is None
    assert band.lower.values.min() < 0.0
    with pytest.raises(EmptySampleError):
        dkw_band([], 0.1, unit_grid)


def test_dkw_coverage_on_uniform_samples():
    grid = make_uniform_grid(0.0, 1.0, 100)
    rng = np.random.default_rng(77)
    covered = 0
    for _ in range(1000):
        band = dkw_band(rng.uniform(size=200), 0.1, grid)
        truth = grid.points
        covered += bool(np.all((band.lower.values <= truth) & (truth <= band.upper.values)))
    assert covered / 1000 >= 0.90


def test_concentration_bound_violation_rate():
    rng = np.random.default_rng(101)
    n, m, x = 100, 20, 2.0
    violations = 0
    for seed in range(500):
        rows = rng.uniform(-1.0, 1.0, (n, m))
        nu = np.max(np.abs(rows.mean(axis=0)))
        nu_sym = np.max(np.abs(rademacher_average(rows, seed)))
        envelope = np.max(np.abs(rows))
        violations += nu > 2 * nu_sym + 3 * envelope * math.sqrt(2 * x / n)
    assert violations / 500 <= 2 * math.exp(-x) + 0.02


def test_symmetrization_inequality_on_average():
    rng = np.random.default_rng(202)
    n, m = 100, 20
    plain, symmetrized = [], []
    for seed in range(500):
        rows = rng.uniform(-1.0, 1.0, (n, m))
        plain.append(np.max(np.abs(rows.mean(axis=0))))
        symmetrized.append(np.max(np.abs(rademacher_average(rows, seed))))
    assert np.mean(symmetrized) >= 0.5 * np.mean(plain)


def test_fit_record_requires_positive_alpha(sym_grid):
    op = DiscreteOperator(matrix=np.eye(sym_grid.m), grid_z=sym_grid, grid_w=sym_grid)
    with pytest.raises(ValueError):
        Fit(
            model="npiv",
            phi_hat=GridFunction(grid=sym_grid, values=np.zeros(sym_grid.m)),
            operator=op,
            normal_rhs=np.zeros(sym_grid.m),
            residuals_u=np.zeros(3),
            alpha=0.0,
        )


def test_centered_covariance_is_sample_covariance(rng, unit_grid):
    rows = 3.0 + rng.normal(size=(200, unit_grid.m))
    res = ResidualMatrix(values=rows, grid=unit_grid, process_index=2)
    expected = np.cov(rows, rowvar=False, bias=True)
    np.testing.assert_allclose(estimate_covariance(res, center=True), expected, atol=1e-10)
    assert np.max(estimate_covariance(res)) > 8.0


def test_deconv_gauss_band_centers_rows():
    fit = deconv_fit(simulate_deconv_dgp(1000, seed=11, grid_m=60), 0.05)
    res = fit.process_rows
    band = build_band(fit, res, BandRequest(method="gauss", process_index=2, gamma=0.05, gauss_draws=1000, seed=2))
    assert band.diagnostics.covariance_rows == "centered"

    uncentered = gaussian_quantile(estimate_covariance(res), res.grid, "sup", 0.05, 1000, 2)
    assert band.diagnostics.gauss_quantile < uncentered
