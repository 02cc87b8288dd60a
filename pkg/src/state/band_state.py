"""
Band requests and results, Monte Carlo records, CLI run specs and the band pipeline state
"""
import operator
from pathlib import Path
from typing import Annotated, Any, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing_extensions import TypedDict

from config import (
    DEFAULT_C0,
    DEFAULT_GAMMA,
    DEFAULT_GAUSS_DRAWS,
    DEFAULT_GRID_M,
    DEFAULT_SEED,
    DEFAULT_TRUNCATION,
    MIN_GAUSS_DRAWS,
)
from .model_state import Fit, ResidualMatrix
from .numerics import Grid, GridFunction

BandMethod = Literal["gauss", "concentration"]
ProcessIndex = Literal[1, 2]


class BandRequest(BaseModel):
    """What kind of band to build and with which randomness"""
    model_config = ConfigDict(frozen=True)

    method: BandMethod
    process_index: ProcessIndex
    gamma: float = Field(gt=0, lt=1)
    c0: float = Field(default=DEFAULT_C0, ge=0)
    gauss_draws: int = Field(default=DEFAULT_GAUSS_DRAWS, ge=1)
    seed: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def _check_draws(self):
        if self.method == "gauss" and self.gauss_draws < MIN_GAUSS_DRAWS:
            raise ValueError(f"gauss_draws must be at least {MIN_GAUSS_DRAWS}, got {self.gauss_draws}")
        return self


class BandDiagnostics(BaseModel):
    """Ingredients of the half-width, kept for inspection and the meta file"""
    model_config = ConfigDict(frozen=True)

    norm_2inf: float
    envelope: Optional[float] = None
    sym_supremum: Optional[float] = None
    gauss_quantile: Optional[float] = None
    covariance_rows: Optional[str] = None


class ConfidenceBand(BaseModel):
    """Uniform band [estimate - half_width, estimate + half_width] on a grid"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    estimate: GridFunction
    half_width: float = Field(gt=0)
    lower: GridFunction
    upper: GridFunction
    method: Literal["gauss", "concentration", "dkw"]
    gamma: float = Field(gt=0, lt=1)
    n: int = Field(ge=1)
    process_index: Optional[ProcessIndex] = None
    alpha: Optional[float] = None
    h: Optional[float] = None
    seed: Optional[int] = None
    request: Optional[BandRequest] = None
    diagnostics: Optional[BandDiagnostics] = None

    @model_validator(mode="after")
    def _check_geometry(self):
        tol = 1e-9 * max(1.0, self.half_width, float(np.max(np.abs(self.estimate.values))))
        if np.max(np.abs(self.upper.values - self.estimate.values - self.half_width)) > tol:
            raise ValueError("upper bound must equal estimate + half_width")
        if np.max(np.abs(self.estimate.values - self.lower.values - self.half_width)) > tol:
            raise ValueError("lower bound must equal estimate - half_width")
        return self

    @classmethod
    def around(cls, estimate: GridFunction, half_width: float, **fields) -> "ConfidenceBand":
        """Build the symmetric band about an estimate."""
        lower = GridFunction(grid=estimate.grid, values=estimate.values - half_width)
        upper = GridFunction(grid=estimate.grid, values=estimate.values + half_width)
        return cls(estimate=estimate, half_width=half_width, lower=lower, upper=upper, **fields)


class BandMeta(BaseModel):
    """Sidecar record written next to every band CSV"""
    method: str
    process: Optional[int]
    gamma: float
    alpha: Optional[float]
    h: Optional[float]
    half_width: float
    norm_2inf: Optional[float]
    n: int
    seed: Optional[int]


class McConfig(BaseModel):
    """One Monte Carlo coverage experiment"""
    model_config = ConfigDict(frozen=True)

    n: int = Field(gt=1)
    replications: int = Field(gt=0)
    alpha: float = Field(gt=0)
    h: float = Field(gt=0)
    gamma: float = Field(gt=0, lt=1)
    method: BandMethod
    process_index: ProcessIndex = 1
    grid_m: int = Field(default=100, ge=2)
    truncation: float = Field(default=1.0, gt=0)
    master_seed: int = Field(default=0, ge=0)
    model: Literal["npiv", "deconv"] = "npiv"
    phi_scale: float = Field(default=1.0, ge=0)
    noise_scale: float = Field(default=1.0, ge=0)
    c0: float = Field(default=DEFAULT_C0, ge=0)
    gauss_draws: int = Field(default=DEFAULT_GAUSS_DRAWS, ge=MIN_GAUSS_DRAWS)


class McReport(BaseModel):
    """Aggregated outcome of a coverage experiment"""
    model_config = ConfigDict(frozen=True)

    coverage: float = Field(ge=0, le=1)
    mean_half_width: float = Field(gt=0)
    mean_sup_bias: float
    replications_used: int = Field(ge=1)
    replications_failed: int = Field(default=0, ge=0)
    config: McConfig

    # pointwise averages over successful replications; written as a separate CSV
    grid_points: List[float] = Field(default_factory=list, exclude=True)
    truth: List[float] = Field(default_factory=list, exclude=True)
    mean_estimate: List[float] = Field(default_factory=list, exclude=True)
    mean_lower: List[float] = Field(default_factory=list, exclude=True)
    mean_upper: List[float] = Field(default_factory=list, exclude=True)


CommandName = Literal["npiv", "funreg", "deconv", "mc", "dkw"]


class RunSpec(BaseModel):
    """Validated command-line request"""
    model_config = ConfigDict(frozen=True)

    command: CommandName
    input_path: Optional[Path] = None
    output_path: Path
    alpha: Optional[float] = Field(default=None, gt=0)
    h: Optional[float] = Field(default=None, gt=0)
    gamma: float = Field(default=DEFAULT_GAMMA, gt=0, lt=1)
    method: BandMethod = "gauss"
    process_index: Optional[ProcessIndex] = None
    grid_m: int = Field(default=DEFAULT_GRID_M, ge=2)
    c0: float = Field(default=DEFAULT_C0, ge=0)
    gauss_draws: int = Field(default=DEFAULT_GAUSS_DRAWS, ge=MIN_GAUSS_DRAWS)
    seed: int = Field(default=DEFAULT_SEED, ge=0)
    truncation: float = Field(default=DEFAULT_TRUNCATION, gt=0)
    t_bounds: Tuple[float, float] = (0.0, 1.0)
    s_bounds: Tuple[float, float] = (0.0, 1.0)
    noise: Optional[str] = None
    noise_table: Optional[Path] = None
    mc: Optional[McConfig] = None
    jobs: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def _check_required(self):
        if self.command in ("npiv", "funreg", "deconv", "dkw") and self.input_path is None:
            raise ValueError(f"--input is required for {self.command}")
        if self.command in ("npiv", "funreg", "deconv") and self.alpha is None:
            raise ValueError(f"--alpha is required for {self.command}")
        if self.command == "npiv" and self.h is None:
            raise ValueError("--h is required for npiv")
        if self.command == "deconv" and self.noise is None and self.noise_table is None:
            raise ValueError("deconv needs --noise or --noise-table")
        if self.command == "mc" and self.mc is None:
            raise ValueError("mc needs a preset or --n, --alpha and --h")
        return self

    @property
    def process(self) -> int:
        """Requested process, defaulting to 2 for deconvolution and 1 otherwise."""
        if self.process_index is not None:
            return self.process_index
        return 2 if self.command == "deconv" else 1


class BandPipelineState(TypedDict):
    """
    State flowing through the band pipeline graph.
    Each node returns a partial update; notes accumulate across nodes.
    """
    # Input
    run_spec: RunSpec

    # Loaded sample and grids
    data: Optional[Any]
    grid_z: Optional[Grid]
    grid_w: Optional[Grid]

    # Estimation and inference results
    fit: Optional[Fit]
    residuals: Optional[ResidualMatrix]
    band: Optional[ConfidenceBand]

    # Running log of what each node did
    notes: Annotated[List[str], operator.add]

    # Workflow control
    current_step: str
    complete: bool
    error: Optional[str]
