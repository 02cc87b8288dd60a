"""
CSV ingestion for the three models and the DKW sample, and band/report emission
"""
import logging
import math
import re
from pathlib import Path
from typing import List, Tuple, Union

import numpy as np
import pandas as pd

from ..exceptions import DataFormatError
from ..state import BandMeta, ConfidenceBand, DeconvData, FunRegData, Grid, McReport, NoiseDensity, NpivData
from .grid import make_uniform_grid

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

# full double precision, read back bit-exactly
FLOAT_FORMAT = "%.17g"


def _read_table(path: PathLike) -> pd.DataFrame:
    try:
        frame = pd.read_csv(
            path, dtype=str, keep_default_na=False, skipinitialspace=True, skip_blank_lines=False
        )
    except pd.errors.EmptyDataError as e:
        raise DataFormatError(f"{path} is empty") from e
    except pd.errors.ParserError as e:
        raise DataFormatError(f"cannot read {path}: {e}") from e
    frame.columns = [str(c).strip() for c in frame.columns]
    # index is the line in the file; header is line 1
    frame.index = frame.index + 2
    frame = frame.fillna("")
    blank = (frame.apply(lambda column: column.str.strip()) == "").all(axis=1)
    return frame[~blank]


def _require(frame: pd.DataFrame, columns: List[str], path: PathLike) -> None:
    for column in columns:
        if column not in frame.columns:
            raise DataFormatError(f"missing column '{column}' in {path}")


def _parse_column(frame: pd.DataFrame, column: str, path: PathLike) -> np.ndarray:
    values = np.empty(len(frame))
    for i, (line, cell) in enumerate(frame[column].items()):
        try:
            value = float(cell)
        except ValueError:
            value = math.nan
        if not math.isfinite(value):
            raise DataFormatError(f"cannot parse {cell!r} in column '{column}' at line {line} of {path}")
        values[i] = value
    return values


def _check_rows(frame: pd.DataFrame, minimum: int, path: PathLike) -> None:
    if len(frame) < minimum:
        raise DataFormatError(f"{path} has {len(frame)} data rows, need at least {minimum}")


def load_npiv_csv(path: PathLike) -> NpivData:
    """
    Load an NPIV sample from a CSV with header y,z,w.

    Args:
        path: CSV file

    Returns:
        NpivData with one observation per data row
    """
    frame = _read_table(path)
    _require(frame, ["y", "z", "w"], path)
    _check_rows(frame, 2, path)
    data = NpivData(
        y=_parse_column(frame, "y", path),
        z=_parse_column(frame, "z", path),
        w=_parse_column(frame, "w", path),
    )
    logger.info("Loaded %d NPIV observations from %s", data.n, path)
    return data


def _curve_columns(frame: pd.DataFrame, prefix: str, path: PathLike) -> List[str]:
    pattern = re.compile(rf"^{prefix}_(\d+)$")
    found = sorted(
        (int(match.group(1)), column)
        for column in frame.columns
        if (match := pattern.match(column))
    )
    if len(found) < 2:
        raise DataFormatError(f"missing columns '{prefix}_1', '{prefix}_2', ... in {path}")
    expected = list(range(1, len(found) + 1))
    if [index for index, _ in found] != expected:
        raise DataFormatError(f"columns {prefix}_1..{prefix}_{len(found)} must be consecutive in {path}")
    return [column for _, column in found]


def load_funreg_csv(
    path: PathLike,
    t_bounds: Tuple[float, float] = (0.0, 1.0),
    s_bounds: Tuple[float, float] = (0.0, 1.0),
) -> FunRegData:
    """Load curves from a wide CSV: y, then z_1..z_mt, then w_1..w_ms."""
    frame = _read_table(path)
    _require(frame, ["y"], path)
    z_columns = _curve_columns(frame, "z", path)
    w_columns = _curve_columns(frame, "w", path)
    _check_rows(frame, 2, path)

    z_curves = np.column_stack([_parse_column(frame, c, path) for c in z_columns])
    w_curves = np.column_stack([_parse_column(frame, c, path) for c in w_columns])
    data = FunRegData(
        y=_parse_column(frame, "y", path),
        z_curves=z_curves,
        w_curves=w_curves,
        grid_t=make_uniform_grid(t_bounds[0], t_bounds[1], len(z_columns)),
        grid_s=make_uniform_grid(s_bounds[0], s_bounds[1], len(w_columns)),
    )
    logger.info("Loaded %d curves (%d z points, %d w points) from %s", data.n, len(z_columns), len(w_columns), path)
    return data


def load_deconv_csv(path: PathLike, noise_density: NoiseDensity, grid: Grid) -> DeconvData:
    """Load contaminated observations from a CSV with header y."""
    frame = _read_table(path)
    _require(frame, ["y"], path)
    _check_rows(frame, 1, path)
    return DeconvData(y=_parse_column(frame, "y", path), noise_density=noise_density, grid_z=grid)


def load_sample_csv(path: PathLike) -> np.ndarray:
    """Load a univariate sample from a CSV with header x."""
    frame = _read_table(path)
    _require(frame, ["x"], path)
    _check_rows(frame, 1, path)
    return _parse_column(frame, "x", path)


def load_noise_table(path: PathLike) -> NoiseDensity:
    """Tabulated error density from a CSV with header u,f."""
    frame = _read_table(path)
    _require(frame, ["u", "f"], path)
    _check_rows(frame, 2, path)
    u = _parse_column(frame, "u", path)
    f = _parse_column(frame, "f", path)
    order = np.argsort(u, kind="stable")
    try:
        return NoiseDensity(kind="tabulated", table_u=u[order], table_f=f[order])
    except ValueError as e:
        raise DataFormatError(f"invalid noise table {path}: {e}") from e


def parse_noise_spec(spec: str) -> NoiseDensity:
    """Parse 'epanechnikov:SCALE'."""
    family, _, scale = spec.partition(":")
    if family.strip().lower() != "epanechnikov" or not scale:
        raise DataFormatError(f"noise must look like 'epanechnikov:SCALE', got {spec!r}")
    try:
        value = float(scale)
    except ValueError as e:
        raise DataFormatError(f"noise scale {scale!r} is not a number") from e
    if not value > 0:
        raise DataFormatError(f"noise scale must be positive, got {value}")
    return NoiseDensity(kind="epanechnikov", scale=value)


def meta_path(path: PathLike) -> Path:
    return Path(f"{path}.meta.json")


def curve_path(path: PathLike) -> Path:
    return Path(f"{path}.curve.csv")


def _write_frame(frame: pd.DataFrame, path: PathLike) -> None:
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def band_meta(band: ConfidenceBand) -> BandMeta:
    return BandMeta(
        method=band.method,
        process=band.process_index,
        gamma=band.gamma,
        alpha=band.alpha,
        h=band.h,
        half_width=band.half_width,
        norm_2inf=band.diagnostics.norm_2inf if band.diagnostics is not None else None,
        n=band.n,
        seed=band.seed,
    )


def write_band_csv(band: ConfidenceBand, path: PathLike) -> None:
    """
    Write z,estimate,lower,upper with 17 significant digits, plus <path>.meta.json.

    Args:
        band: Band to write
        path: Destination CSV
    """
    frame = pd.DataFrame({
        "z": band.estimate.grid.points,
        "estimate": band.estimate.values,
        "lower": band.lower.values,
        "upper": band.upper.values,
    })
    _write_frame(frame, path)
    meta_path(path).write_text(band_meta(band).model_dump_json(indent=2) + "\n")
    logger.info("Wrote band with %d points to %s", len(frame), path)


def write_ecdf_csv(band: ConfidenceBand, path: PathLike) -> None:
    """Write x,ecdf,lower,upper for a DKW band."""
    frame = pd.DataFrame({
        "x": band.estimate.grid.points,
        "ecdf": band.estimate.values,
        "lower": band.lower.values,
        "upper": band.upper.values,
    })
    _write_frame(frame, path)
    logger.info("Wrote ECDF band with %d points to %s", len(frame), path)


def write_report_json(report: McReport, path: PathLike) -> None:
    Path(path).write_text(report.model_dump_json(indent=2) + "\n")


def write_curve_csv(report: McReport, path: PathLike) -> None:
    """Write the replication-averaged curves z,truth,mean_estimate,mean_lower,mean_upper."""
    frame = pd.DataFrame({
        "z": report.grid_points,
        "truth": report.truth,
        "mean_estimate": report.mean_estimate,
        "mean_lower": report.mean_lower,
        "mean_upper": report.mean_upper,
    })
    _write_frame(frame, path)


def read_band_csv(path: PathLike) -> pd.DataFrame:
    """Read a band CSV back as floats."""
    return pd.read_csv(path, dtype=float, float_precision="round_trip")
