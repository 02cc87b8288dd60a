"""
LangGraph workflow for the fit-and-band commands, plus the Monte Carlo and DKW runners
"""
import logging

import numpy as np
from langgraph.graph import END, StateGraph

from ..state import BandPipelineState, ConfidenceBand, McReport, RunSpec
from ..utils import (
    dkw_band,
    load_sample_csv,
    make_uniform_grid,
    run_coverage,
    write_curve_csv,
    write_ecdf_csv,
    write_report_json,
)
from ..utils.data_io import curve_path
from .nodes import (
    band_node,
    fit_node,
    load_data_node,
    residuals_node,
    route_after,
    write_outputs_node,
)

logger = logging.getLogger(__name__)

STEPS = [
    ("load_data", load_data_node),
    ("fit_model", fit_node),
    ("build_residuals", residuals_node),
    ("build_band", band_node),
    ("write_outputs", write_outputs_node),
]


def create_band_pipeline():
    """
    Build the graph load_data -> fit_model -> build_residuals -> build_band -> write_outputs.

    Every node is followed by a conditional edge that ends the run on error.

    Returns:
        Compiled StateGraph
    """
    workflow = StateGraph(BandPipelineState)

    for name, node in STEPS:
        workflow.add_node(name, node)
    workflow.set_entry_point(STEPS[0][0])

    for (name, _), (next_name, _) in zip(STEPS, STEPS[1:]):
        workflow.add_conditional_edges(name, route_after, {"continue": next_name, "error": END})
    workflow.add_edge(STEPS[-1][0], END)

    app = workflow.compile()
    logger.debug("Band pipeline compiled")
    return app


band_pipeline = create_band_pipeline()


def run_band_pipeline(run_spec: RunSpec) -> dict:
    """
    Run npiv, funreg or deconv end to end.

    Args:
        run_spec: Validated request

    Returns:
        Final pipeline state; state["error"] is set when a node failed
    """
    initial_state = {
        "run_spec": run_spec,
        "data": None,
        "grid_z": None,
        "grid_w": None,
        "fit": None,
        "residuals": None,
        "band": None,
        "notes": [],
        "current_step": "initialized",
        "complete": False,
        "error": None,
    }

    logger.info("Starting %s pipeline", run_spec.command)
    final_state = band_pipeline.invoke(initial_state)
    logger.info("Pipeline finished at step %s", final_state.get("current_step"))
    return final_state


def run_coverage_study(run_spec: RunSpec) -> McReport:
    """Run the coverage experiment and write the report JSON and averaged curves."""
    report = run_coverage(run_spec.mc, n_jobs=run_spec.jobs)
    write_report_json(report, run_spec.output_path)
    write_curve_csv(report, curve_path(run_spec.output_path))
    return report


def run_dkw(run_spec: RunSpec) -> ConfidenceBand:
    """DKW band for the sample's CDF on a grid spanning the sample range."""
    sample = load_sample_csv(run_spec.input_path)
    lo, hi = float(np.min(sample)), float(np.max(sample))
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    band = dkw_band(sample, run_spec.gamma, make_uniform_grid(lo, hi, run_spec.grid_m))
    write_ecdf_csv(band, run_spec.output_path)
    return band
