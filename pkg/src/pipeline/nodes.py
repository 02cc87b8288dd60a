"""
Band pipeline node functions

Each function is a node of the fit-and-band graph. A node returns a partial
state update; on failure it records the error and the graph stops.
"""
import logging
from typing import Any, Dict

from ..exceptions import ProcessIndexError, TikbandError
from ..state import BandPipelineState, BandRequest
from ..utils import (
    build_band,
    deconv_fit,
    funreg_fit,
    load_deconv_csv,
    load_funreg_csv,
    load_noise_table,
    load_npiv_csv,
    make_uniform_grid,
    npiv_fit,
    npiv_residuals,
    parse_noise_spec,
    write_band_csv,
)

logger = logging.getLogger(__name__)

# failures a node turns into state["error"]; anything else is a bug and propagates
NODE_ERRORS = (TikbandError, OSError, ValueError)


def _failed(step: str, e: Exception) -> Dict[str, Any]:
    logger.info("Step %s failed: %s", step, e)
    return {"error": str(e), "current_step": f"{step}_failed"}


def load_data_node(state: BandPipelineState) -> Dict[str, Any]:
    """
    Node 1: Read the input sample and lay out the grids.
    """
    spec = state["run_spec"]
    logger.info("[Node: Load Data] Reading %s input from %s", spec.command, spec.input_path)

    try:
        if spec.command == "npiv":
            data = load_npiv_csv(spec.input_path)
            grid = make_uniform_grid(-spec.truncation, spec.truncation, spec.grid_m)
            grid_z, grid_w = grid, grid
        elif spec.command == "funreg":
            data = load_funreg_csv(spec.input_path, spec.t_bounds, spec.s_bounds)
            grid_z, grid_w = data.grid_t, data.grid_s
        else:
            if spec.noise_table is not None:
                noise = load_noise_table(spec.noise_table)
            else:
                noise = parse_noise_spec(spec.noise)
            grid_z = make_uniform_grid(-spec.truncation, spec.truncation, spec.grid_m)
            grid_w = grid_z
            data = load_deconv_csv(spec.input_path, noise, grid_z)

        return {
            "data": data,
            "grid_z": grid_z,
            "grid_w": grid_w,
            "current_step": "load_data",
            "notes": [f"loaded {data.n} observations"],
        }
    except NODE_ERRORS as e:
        return _failed("load_data", e)


def fit_node(state: BandPipelineState) -> Dict[str, Any]:
    """
    Node 2: Compute the Tikhonov estimate.
    """
    spec = state["run_spec"]
    logger.info("[Node: Fit] %s with alpha=%s", spec.command, spec.alpha)

    try:
        if spec.command == "npiv":
            fit = npiv_fit(
                state["data"], spec.alpha, spec.h, state["grid_z"], state["grid_w"], truncation=spec.truncation
            )
        elif spec.command == "funreg":
            fit = funreg_fit(state["data"], spec.alpha)
        else:
            fit = deconv_fit(state["data"], spec.alpha)

        return {
            "fit": fit,
            "current_step": "fit_model",
            "notes": [f"fitted {fit.model} on {fit.n} observations"],
        }
    except NODE_ERRORS as e:
        return _failed("fit_model", e)


def residuals_node(state: BandPipelineState) -> Dict[str, Any]:
    """
    Node 3: Evaluate the residual process for the requested index.
    """
    spec = state["run_spec"]
    fit = state["fit"]
    process = spec.process
    logger.info("[Node: Residuals] process %d", process)

    try:
        if fit.model == "npiv":
            grid = state["grid_w"] if process == 1 else state["grid_z"]
            residuals = npiv_residuals(fit, state["data"], process, grid)
        elif fit.process_rows.process_index != process:
            raise ProcessIndexError(
                f"{fit.model} supports process {fit.process_rows.process_index} only, got {process}"
            )
        else:
            residuals = fit.process_rows

        return {
            "residuals": residuals,
            "current_step": "build_residuals",
            "notes": [f"residual process {process} on {residuals.grid.m} points"],
        }
    except NODE_ERRORS as e:
        return _failed("build_residuals", e)


def band_node(state: BandPipelineState) -> Dict[str, Any]:
    """
    Node 4: Build the uniform band.
    """
    spec = state["run_spec"]
    logger.info("[Node: Band] %s band at gamma=%s", spec.method, spec.gamma)

    try:
        request = BandRequest(
            method=spec.method,
            process_index=spec.process,
            gamma=spec.gamma,
            c0=spec.c0,
            gauss_draws=spec.gauss_draws,
            seed=spec.seed,
        )
        band = build_band(state["fit"], state["residuals"], request, n_jobs=spec.jobs)
        return {
            "band": band,
            "current_step": "build_band",
            "notes": [f"{spec.method} half-width {band.half_width:.6g}"],
        }
    except NODE_ERRORS as e:
        return _failed("build_band", e)


def write_outputs_node(state: BandPipelineState) -> Dict[str, Any]:
    """
    Node 5: Write the band CSV and its meta file.
    """
    spec = state["run_spec"]
    logger.info("[Node: Write Outputs] %s", spec.output_path)

    try:
        write_band_csv(state["band"], spec.output_path)
        return {
            "current_step": "write_outputs",
            "complete": True,
            "notes": [f"wrote {spec.output_path}"],
        }
    except NODE_ERRORS as e:
        return _failed("write_outputs", e)


def route_after(state: BandPipelineState) -> str:
    """
    Conditional edge: stop at the first failed node.
    """
    if state.get("error"):
        return "error"
    return "continue"
