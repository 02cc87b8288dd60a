from .exceptions import TikbandError
from .pipeline import run_band_pipeline, run_coverage_study, run_dkw
from .state import RunSpec, ConfidenceBand, McConfig, McReport
from .utils import *

__all__ = [
    "TikbandError",
    "run_band_pipeline",
    "run_coverage_study",
    "run_dkw",
    "RunSpec",
    "ConfidenceBand",
    "McConfig",
    "McReport",
]
