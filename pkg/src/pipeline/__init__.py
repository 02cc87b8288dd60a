from .workflow import band_pipeline, create_band_pipeline, run_band_pipeline, run_coverage_study, run_dkw

__all__ = ["band_pipeline", "create_band_pipeline", "run_band_pipeline", "run_coverage_study", "run_dkw"]
