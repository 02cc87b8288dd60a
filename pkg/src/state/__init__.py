from .numerics import Grid, GridFunction, KernelFamily, KernelSpec, DiscreteOperator
from .model_state import NpivData, FunRegData, NoiseDensity, DeconvData, ResidualMatrix, Fit
from .band_state import (
    BandRequest,
    BandDiagnostics,
    ConfidenceBand,
    BandMeta,
    McConfig,
    McReport,
    RunSpec,
    BandPipelineState,
)

__all__ = [
    "Grid",
    "GridFunction",
    "KernelFamily",
    "KernelSpec",
    "DiscreteOperator",
    "NpivData",
    "FunRegData",
    "NoiseDensity",
    "DeconvData",
    "ResidualMatrix",
    "Fit",
    "BandRequest",
    "BandDiagnostics",
    "ConfidenceBand",
    "BandMeta",
    "McConfig",
    "McReport",
    "RunSpec",
    "BandPipelineState",
]
