"""
Discretization records: grids, functions on grids, kernels and integral operators
"""
from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


def frozen_array(value, ndim: int) -> np.ndarray:
    """Copy to a read-only float array of the given rank."""
    arr = np.array(value, dtype=float)
    if arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-d array, got shape {arr.shape}")
    arr.flags.writeable = False
    return arr


class Grid(BaseModel):
    """Midpoint grid of m equidistant points on [a, b]"""
    model_config = ConfigDict(frozen=True)

    a: float
    b: float
    m: int

    @model_validator(mode="after")
    def _check_bounds(self):
        if not self.a < self.b:
            raise ValueError(f"grid requires a < b, got a={self.a}, b={self.b}")
        if self.m < 2:
            raise ValueError(f"grid requires at least 2 points, got {self.m}")
        return self

    @property
    def delta(self) -> float:
        return (self.b - self.a) / self.m

    @property
    def points(self) -> np.ndarray:
        return self.a + (np.arange(self.m) + 0.5) * self.delta

    @property
    def length(self) -> float:
        return self.b - self.a


class GridFunction(BaseModel):
    """Real values of a function at the points of a grid"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    grid: Grid
    values: np.ndarray

    @field_validator("values", mode="before")
    @classmethod
    def _to_array(cls, value):
        return frozen_array(value, 1)

    @model_validator(mode="after")
    def _check_values(self):
        if self.values.shape[0] != self.grid.m:
            raise ValueError(
                f"{self.values.shape[0]} values for a grid of {self.grid.m} points"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("grid function values must be finite")
        return self


class KernelFamily(str, Enum):
    EPANECHNIKOV = "epanechnikov"


class KernelSpec(BaseModel):
    """Symmetric smoothing kernel with compact support"""
    model_config = ConfigDict(frozen=True)

    family: KernelFamily = KernelFamily.EPANECHNIKOV
    support_radius: float = Field(default=1.0, gt=0)


class DiscreteOperator(BaseModel):
    """
    Quadrature discretization of an integral operator.

    matrix[j, k] = kernel(z_k, w_j) * delta_z, so (T phi)(w_j) = sum_k matrix[j, k] phi(z_k).
    The transpose discretizes the adjoint.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    matrix: np.ndarray
    grid_z: Grid
    grid_w: Grid

    @field_validator("matrix", mode="before")
    @classmethod
    def _to_array(cls, value):
        return frozen_array(value, 2)

    @model_validator(mode="after")
    def _check_shape(self):
        expected = (self.grid_w.m, self.grid_z.m)
        if self.matrix.shape != expected:
            raise ValueError(f"operator matrix has shape {self.matrix.shape}, expected {expected}")
        return self

    @property
    def delta_z(self) -> float:
        return self.grid_z.delta

    def kernel_values(self) -> np.ndarray:
        """Kernel k(z_k, w_j) laid out as (m_z, m_w)."""
        return self.matrix.T / self.delta_z

    def apply(self, phi: np.ndarray) -> np.ndarray:
        return self.matrix @ phi

    def adjoint_apply(self, psi: np.ndarray) -> np.ndarray:
        return self.matrix.T @ psi
