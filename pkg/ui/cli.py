"""
Command-line interface for tikband

Subcommands npiv, funreg and deconv fit an estimator and write a band CSV;
mc runs a coverage experiment; dkw writes the DKW band around an empirical CDF.
"""
import logging
import sys
from typing import List, Optional

import click
from pydantic import ValidationError

from config import (
    DEFAULT_C0,
    DEFAULT_GAMMA,
    DEFAULT_GAUSS_DRAWS,
    DEFAULT_GRID_M,
    DEFAULT_REPLICATIONS,
    DEFAULT_SEED,
    DEFAULT_TRUNCATION,
    LOG_LEVEL,
    MC_PRESETS,
    N_JOBS,
)
from src.exceptions import TikbandError
from src.pipeline import run_band_pipeline, run_coverage_study, run_dkw
from src.state import McConfig, RunSpec

logger = logging.getLogger(__name__)

# pydantic field names as the user typed them
FLAG_NAMES = {
    "input_path": "--input",
    "output_path": "--out",
    "process_index": "--process",
    "grid_m": "--grid",
    "gauss_draws": "--draws",
    "master_seed": "--seed",
    "replications": "--reps",
    "noise_table": "--noise-table",
    "t_bounds": "--t-bounds",
    "s_bounds": "--s-bounds",
}


def describe_validation_error(e: ValidationError) -> str:
    """First validation failure as one line, naming the flag."""
    first = e.errors()[0]
    message = first["msg"].removeprefix("Value error, ")
    fields = [str(part) for part in first.get("loc", ()) if isinstance(part, str)]
    if not fields:
        return message
    name = fields[-1]
    return f"{FLAG_NAMES.get(name, '--' + name.replace('_', '-'))}: {message}"


def _build(model, /, **fields):
    try:
        return model(**fields)
    except ValidationError as e:
        raise click.UsageError(describe_validation_error(e)) from e


def _positive(name: str):
    def check(ctx, param, value):
        if value is not None and not value > 0:
            raise click.BadParameter(f"{name} must be positive")
        return value
    return check


def _shared_band_options(func):
    options = [
        click.option("--input", "input_path", type=click.Path(dir_okay=False), help="Input CSV"),
        click.option("--out", "output_path", required=True, type=click.Path(dir_okay=False), help="Output CSV"),
        click.option("--alpha", type=float, callback=_positive("alpha"), help="Regularization parameter"),
        click.option("--gamma", type=float, default=DEFAULT_GAMMA, show_default=True, help="Band level 1 - gamma"),
        click.option("--method", type=click.Choice(["gauss", "concentration"]), default="gauss", show_default=True),
        click.option("--process", "process_index", type=click.IntRange(1, 2), default=None, help="Residual process 1 or 2"),
        click.option("--grid", "grid_m", type=int, default=DEFAULT_GRID_M, show_default=True, help="Grid points"),
        click.option("--c0", type=float, default=DEFAULT_C0, show_default=True),
        click.option("--draws", "gauss_draws", type=int, default=DEFAULT_GAUSS_DRAWS, show_default=True),
        click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True),
        click.option("--truncation", type=float, default=DEFAULT_TRUNCATION, show_default=True),
        click.option("--jobs", type=int, default=N_JOBS, show_default=True, help="Parallel workers"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


@click.group(name="tikband")
def cli():
    """Tikhonov estimators with uniform confidence bands."""


@cli.command()
@_shared_band_options
@click.option("--h", type=float, callback=_positive("bandwidth"), help="Kernel bandwidth")
def npiv(**options):
    """Nonparametric IV regression from a y,z,w CSV."""
    return _build(RunSpec, command="npiv", **options)


@cli.command()
@_shared_band_options
@click.option("--t-bounds", type=(float, float), default=(0.0, 1.0), show_default=True)
@click.option("--s-bounds", type=(float, float), default=(0.0, 1.0), show_default=True)
def funreg(**options):
    """Functional linear or IV regression from a wide y,z_1..,w_1.. CSV."""
    return _build(RunSpec, command="funreg", **options)


@cli.command()
@_shared_band_options
@click.option("--noise", help="Error density, epanechnikov:SCALE")
@click.option("--noise-table", type=click.Path(dir_okay=False), help="Error density table u,f")
def deconv(**options):
    """Density deconvolution from a y CSV with a known error density."""
    return _build(RunSpec, command="deconv", **options)


@cli.command()
@click.option("--out", "output_path", required=True, type=click.Path(dir_okay=False), help="Report JSON")
@click.option("--preset", type=click.Choice(sorted(MC_PRESETS)), help="Published tuning configuration")
@click.option("--reps", type=int, default=DEFAULT_REPLICATIONS, show_default=True)
@click.option("--n", type=int, help="Sample size")
@click.option("--alpha", type=float, callback=_positive("alpha"))
@click.option("--h", type=float, callback=_positive("bandwidth"))
@click.option("--gamma", type=float, default=DEFAULT_GAMMA, show_default=True)
@click.option("--method", type=click.Choice(["gauss", "concentration"]))
@click.option("--process", "process_index", type=click.IntRange(1, 2))
@click.option("--model", type=click.Choice(["npiv", "deconv"]), default="npiv", show_default=True)
@click.option("--grid", "grid_m", type=int, default=DEFAULT_GRID_M, show_default=True)
@click.option("--c0", type=float, default=DEFAULT_C0, show_default=True)
@click.option("--draws", "gauss_draws", type=int, default=DEFAULT_GAUSS_DRAWS, show_default=True)
@click.option("--truncation", type=float, default=DEFAULT_TRUNCATION, show_default=True)
@click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True)
@click.option("--jobs", type=int, default=N_JOBS, show_default=True)
def mc(output_path, preset, reps, n, alpha, h, gamma, method, process_index, model, grid_m, c0, gauss_draws,
       truncation, seed, jobs):
    """Monte Carlo coverage of a band construction."""
    settings = dict(MC_PRESETS[preset]) if preset else {}
    overrides = {"n": n, "alpha": alpha, "h": h, "method": method, "process_index": process_index}
    settings.update({key: value for key, value in overrides.items() if value is not None})
    if model == "deconv":
        settings.setdefault("h", 1.0)
        settings.setdefault("process_index", 2)
    settings.setdefault("method", "gauss")
    if not {"n", "alpha", "h"} <= settings.keys():
        raise click.UsageError("mc needs a preset or --n, --alpha and --h")

    config = _build(
        McConfig,
        replications=reps,
        gamma=gamma,
        model=model,
        grid_m=grid_m,
        c0=c0,
        gauss_draws=gauss_draws,
        truncation=truncation,
        master_seed=seed,
        **settings,
    )
    return _build(
        RunSpec,
        command="mc",
        output_path=output_path,
        gamma=gamma,
        seed=seed,
        truncation=truncation,
        grid_m=grid_m,
        c0=c0,
        gauss_draws=gauss_draws,
        method=config.method,
        process_index=config.process_index,
        mc=config,
        jobs=jobs,
    )


@cli.command()
@click.option("--input", "input_path", type=click.Path(dir_okay=False), help="Sample CSV with column x")
@click.option("--out", "output_path", required=True, type=click.Path(dir_okay=False))
@click.option("--gamma", type=float, default=DEFAULT_GAMMA, show_default=True)
@click.option("--grid", "grid_m", type=int, default=DEFAULT_GRID_M, show_default=True)
def dkw(**options):
    """DKW band around the empirical CDF."""
    return _build(RunSpec, command="dkw", **options)


def parse_cli(argv: List[str]) -> RunSpec:
    """
    Parse arguments into a validated RunSpec.

    Raises:
        click.ClickException: On usage errors
        click.exceptions.Exit: When help was requested
    """
    result = cli.main(args=list(argv), prog_name="tikband", standalone_mode=False)
    if not isinstance(result, RunSpec):
        raise click.exceptions.Exit(result or 0)
    return result


def execute(spec: RunSpec) -> int:
    """Run a parsed request; returns the exit status."""
    if spec.command in ("npiv", "funreg", "deconv"):
        state = run_band_pipeline(spec)
        if state.get("error"):
            click.echo(f"error: {_one_line(state['error'])}", err=True)
            return 1
    elif spec.command == "mc":
        run_coverage_study(spec)
    else:
        run_dkw(spec)
    return 0


def _one_line(message) -> str:
    return " ".join(str(message).split())


def main(argv: Optional[List[str]] = None) -> int:
    """
    CLI entry point.

    Returns:
        0 on success, 2 on usage errors, 1 on data, numeric or I/O errors
    """
    logging.basicConfig(
        level=LOG_LEVEL,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    argv = sys.argv[1:] if argv is None else argv

    try:
        spec = parse_cli(argv)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.ClickException as e:
        click.echo(f"error: {_one_line(e.format_message())}", err=True)
        return 2
    except click.Abort:
        click.echo("error: aborted", err=True)
        return 1

    try:
        return execute(spec)
    except ValidationError as e:
        click.echo(f"error: {describe_validation_error(e)}", err=True)
        return 1
    except (TikbandError, OSError, ValueError) as e:
        click.echo(f"error: {_one_line(e)}", err=True)
        return 1
