"""
Samples, fitted estimators and residual processes for the three ill-posed models
"""
from typing import Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .numerics import DiscreteOperator, Grid, GridFunction, frozen_array

ModelName = Literal["npiv", "funreg", "deconv"]


class NpivData(BaseModel):
    """Sample (Y_i, Z_i, W_i) of the instrumental regression Y = phi(Z) + U, E[U|W] = 0"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    y: np.ndarray
    z: np.ndarray
    w: np.ndarray

    @field_validator("y", "z", "w", mode="before")
    @classmethod
    def _to_array(cls, value):
        return frozen_array(value, 1)

    @model_validator(mode="after")
    def _check_sample(self):
        n = self.y.shape[0]
        if self.z.shape[0] != n or self.w.shape[0] != n:
            raise ValueError("y, z and w must have equal length")
        if n < 2:
            raise ValueError(f"need at least 2 observations, got {n}")
        if not (np.all(np.isfinite(self.y)) and np.all(np.isfinite(self.z)) and np.all(np.isfinite(self.w))):
            raise ValueError("sample values must be finite")
        return self

    @property
    def n(self) -> int:
        return int(self.y.shape[0])


class FunRegData(BaseModel):
    """Scalar responses with regressor curves Z_i(t) and instrument curves W_i(s) on uniform grids"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    y: np.ndarray
    z_curves: np.ndarray
    w_curves: np.ndarray
    grid_t: Grid
    grid_s: Grid

    @field_validator("y", mode="before")
    @classmethod
    def _to_vector(cls, value):
        return frozen_array(value, 1)

    @field_validator("z_curves", "w_curves", mode="before")
    @classmethod
    def _to_matrix(cls, value):
        return frozen_array(value, 2)

    @model_validator(mode="after")
    def _check_shapes(self):
        n = self.y.shape[0]
        if self.z_curves.shape != (n, self.grid_t.m):
            raise ValueError(f"z_curves has shape {self.z_curves.shape}, expected {(n, self.grid_t.m)}")
        if self.w_curves.shape != (n, self.grid_s.m):
            raise ValueError(f"w_curves has shape {self.w_curves.shape}, expected {(n, self.grid_s.m)}")
        if n < 2:
            raise ValueError(f"need at least 2 observations, got {n}")
        return self

    @property
    def n(self) -> int:
        return int(self.y.shape[0])


class NoiseDensity(BaseModel):
    """
    Known density f of the measurement error.

    Either a scaled Epanechnikov density K(u/scale)/scale or a table of (u, f)
    pairs interpolated linearly and set to zero outside the table.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    kind: Literal["epanechnikov", "tabulated"] = "epanechnikov"
    scale: float = Field(default=1.0, gt=0)
    table_u: Optional[np.ndarray] = None
    table_f: Optional[np.ndarray] = None

    @field_validator("table_u", "table_f", mode="before")
    @classmethod
    def _to_array(cls, value):
        return None if value is None else frozen_array(value, 1)

    @model_validator(mode="after")
    def _check_table(self):
        if self.kind == "tabulated":
            if self.table_u is None or self.table_f is None:
                raise ValueError("tabulated noise density needs table_u and table_f")
            if self.table_u.shape != self.table_f.shape or self.table_u.shape[0] < 2:
                raise ValueError("noise table needs at least 2 (u, f) pairs of equal length")
            if np.any(np.diff(self.table_u) <= 0):
                raise ValueError("noise table u values must be strictly increasing")
            if np.any(self.table_f < 0):
                raise ValueError("noise density must be nonnegative")
        return self

    def __call__(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if self.kind == "epanechnikov":
            x = u / self.scale
            return np.where(np.abs(x) <= 1.0, 0.75 * (1.0 - x ** 2), 0.0) / self.scale
        return np.interp(u, self.table_u, self.table_f, left=0.0, right=0.0)

    @property
    def support(self) -> Tuple[float, float]:
        if self.kind == "epanechnikov":
            return -self.scale, self.scale
        return float(self.table_u[0]), float(self.table_u[-1])

    @property
    def sup(self) -> float:
        if self.kind == "epanechnikov":
            return 0.75 / self.scale
        return float(np.max(self.table_f))

    def mass(self, m: int = 4000) -> float:
        lo, hi = self.support
        step = (hi - lo) / m
        points = lo + (np.arange(m) + 0.5) * step
        return float(step * np.sum(self(points)))


class DeconvData(BaseModel):
    """Contaminated observations Y = Z + U with known error density"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    y: np.ndarray
    noise_density: NoiseDensity
    grid_z: Grid

    @field_validator("y", mode="before")
    @classmethod
    def _to_array(cls, value):
        return frozen_array(value, 1)

    @model_validator(mode="after")
    def _check_noise(self):
        if self.y.shape[0] < 1:
            raise ValueError("deconvolution needs at least one observation")
        mass = self.noise_density.mass()
        if abs(mass - 1.0) > 0.02:
            raise ValueError(f"noise density integrates to {mass:.4f}, expected 1 within 2%")
        return self

    @property
    def n(self) -> int:
        return int(self.y.shape[0])


class ResidualMatrix(BaseModel):
    """Residual processes evaluated on a grid; row i is the i-th summand of the variance process"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    values: np.ndarray
    grid: Grid
    process_index: Literal[1, 2]
    u_n: float = Field(default=1.0, gt=0)

    @field_validator("values", mode="before")
    @classmethod
    def _to_array(cls, value):
        return frozen_array(value, 2)

    @model_validator(mode="after")
    def _check_values(self):
        if self.values.shape[1] != self.grid.m:
            raise ValueError(f"residual rows have {self.values.shape[1]} columns for a grid of {self.grid.m}")
        if self.values.shape[0] < 1:
            raise ValueError("residual matrix needs at least one row")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("residual entries must be finite")
        return self

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    def mean_row(self) -> np.ndarray:
        return self.values.mean(axis=0)


class Fit(BaseModel):
    """Tikhonov-regularized estimate together with the pieces inference needs"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    model: ModelName
    phi_hat: GridFunction
    operator: DiscreteOperator
    r_hat: Optional[GridFunction] = None
    normal_rhs: np.ndarray
    residuals_u: np.ndarray
    alpha: float = Field(gt=0)
    h: Optional[float] = None
    u_n: float = Field(default=1.0, gt=0)
    truncation: Optional[float] = None
    process_rows: Optional[ResidualMatrix] = None
    known_envelope: Optional[float] = None

    @field_validator("normal_rhs", "residuals_u", mode="before")
    @classmethod
    def _to_array(cls, value):
        return frozen_array(value, 1)

    @property
    def n(self) -> int:
        if self.process_rows is not None:
            return self.process_rows.n
        return int(self.residuals_u.shape[0])
