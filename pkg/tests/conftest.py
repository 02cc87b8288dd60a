"""
Shared fixtures: grids, seeded generators and small synthetic samples
"""
import numpy as np
import pandas as pd
import pytest

from src.state import FunRegData, NpivData
from src.utils import make_uniform_grid, simulate_npiv_dgp


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def unit_grid():
    return make_uniform_grid(0.0, 1.0, 20)


@pytest.fixture
def sym_grid():
    return make_uniform_grid(-1.0, 1.0, 40)


@pytest.fixture
def npiv_sample() -> NpivData:
    return simulate_npiv_dgp(400, 1.0, seed=3)


def make_funreg_sample(n: int = 200, m: int = 20, seed: int = 5) -> FunRegData:
    """Functional linear regression Y = int phi(t) Z(t) dt + e with W = Z."""
    rng = np.random.default_rng(seed)
    grid = make_uniform_grid(0.0, 1.0, m)
    t = grid.points
    basis = np.array([np.sqrt(2.0) * np.sin(np.pi * k * t) for k in range(1, 6)])
    scores = rng.standard_normal((n, 5)) / np.arange(1, 6)
    z = scores @ basis
    phi = np.sin(np.pi * t)
    y = grid.delta * z @ phi + 0.1 * rng.standard_normal(n)
    return FunRegData(y=y, z_curves=z, w_curves=z, grid_t=grid, grid_s=grid)


@pytest.fixture
def funreg_sample() -> FunRegData:
    return make_funreg_sample()


@pytest.fixture
def npiv_csv(tmp_path, npiv_sample):
    path = tmp_path / "npiv.csv"
    pd.DataFrame({"y": npiv_sample.y, "z": npiv_sample.z, "w": npiv_sample.w}).to_csv(
        path, index=False, float_format="%.17g"
    )
    return path


@pytest.fixture
def funreg_csv(tmp_path, funreg_sample):
    path = tmp_path / "funreg.csv"
    columns = {"y": funreg_sample.y}
    for j in range(funreg_sample.grid_t.m):
        columns[f"z_{j + 1}"] = funreg_sample.z_curves[:, j]
    for j in range(funreg_sample.grid_s.m):
        columns[f"w_{j + 1}"] = funreg_sample.w_curves[:, j]
    pd.DataFrame(columns).to_csv(path, index=False, float_format="%.17g")
    return path
