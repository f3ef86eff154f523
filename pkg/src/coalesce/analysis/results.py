"""CSV tables of theory curves and estimated curves."""

from collections.abc import Sequence
from pathlib import Path
from typing import Union

import pandas as pd
from pydantic import ValidationError

from coalesce.analysis.models import EstimatedPoint
from coalesce.errors import ResultFileError
from coalesce.theory.models import InterferenceCurve, InterferencePoint
from coalesce.utils.files import atomic_writer
from coalesce.utils.logging import get_logger

logger = get_logger(__name__)

THEORY_COLUMNS = ["tau_fs", "p20", "p02", "p11"]
ESTIMATE_COLUMNS = ["tau_fs", "p20", "p20_err", "p02", "p02_err", "p11", "p11_err"]
FLOAT_FORMAT = "%.15g"

PathLike = Union[str, Path]


def _write(frame: pd.DataFrame, path: PathLike) -> Path:
    with atomic_writer(path) as handle:
        frame.to_csv(handle, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.debug(f"Wrote {len(frame)} rows to {path}")
    return Path(path)


def _read(path: PathLike, columns: list[str]) -> pd.DataFrame:
    try:
        frame = pd.read_csv(path, dtype=float)
    except (ValueError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise ResultFileError(f"{path}: {e}") from e
    if list(frame.columns) != columns:
        raise ResultFileError(f"{path}: expected columns {','.join(columns)}")
    if frame.isna().to_numpy().any():
        raise ResultFileError(f"{path}: missing values")
    return frame


def theory_frame(curve: InterferenceCurve) -> pd.DataFrame:
    return pd.DataFrame(
        {"tau_fs": curve.taus, "p20": curve.p20, "p02": curve.p02, "p11": curve.p11},
        columns=THEORY_COLUMNS,
    )


def estimates_frame(points: Sequence[EstimatedPoint]) -> pd.DataFrame:
    rows = [
        (p.tau_fs, p.p20_hat, p.p20_err, p.p02_hat, p.p02_err, p.p11_hat, p.p11_err)
        for p in points
    ]
    return pd.DataFrame(rows, columns=ESTIMATE_COLUMNS)


def write_theory_csv(curve: InterferenceCurve, path: PathLike) -> Path:
    """Write a theory curve as tau_fs,p20,p02,p11."""
    return _write(theory_frame(curve), path)


def write_estimates_csv(points: Sequence[EstimatedPoint], path: PathLike) -> Path:
    """Write estimates as tau_fs,p20,p20_err,p02,p02_err,p11,p11_err."""
    return _write(estimates_frame(points), path)


def read_theory_csv(path: PathLike) -> list[InterferencePoint]:
    """Read a theory curve CSV back into validated points.

    Raises:
        ResultFileError: On missing columns or rows violating the point invariants
    """
    frame = _read(path, THEORY_COLUMNS)
    try:
        return [
            InterferencePoint(tau_fs=row.tau_fs, p20=row.p20, p02=row.p02, p11=row.p11)
            for row in frame.itertuples(index=False)
        ]
    except ValidationError as e:
        raise ResultFileError(f"{path}: {e}") from e


def read_estimates_csv(path: PathLike) -> list[EstimatedPoint]:
    """Read an estimated-curve CSV.

    Raises:
        ResultFileError: On missing columns or negative estimates
    """
    frame = _read(path, ESTIMATE_COLUMNS)
    try:
        return [
            EstimatedPoint(
                tau_fs=row.tau_fs,
                p20_hat=row.p20,
                p02_hat=row.p02,
                p11_hat=row.p11,
                p20_err=row.p20_err,
                p02_err=row.p02_err,
                p11_err=row.p11_err,
            )
            for row in frame.itertuples(index=False)
        ]
    except ValidationError as e:
        raise ResultFileError(f"{path}: {e}") from e
