"""Aligned daily multivariate series with a per-cell missing-value mask."""

import warnings
from dataclasses import dataclass

import numpy as np
import pandas as pd

from .errors import ValidationError

__all__ = ["TimeSeriesFrame", "ingest"]


@dataclass
class TimeSeriesFrame:
    """Daily multivariate series: contiguous date index, named real
    columns, boolean mask marking missing cells."""

    data: pd.DataFrame  # float values, DatetimeIndex, daily frequency
    mask: pd.DataFrame  # True where the cell is missing

    def __post_init__(self):
        idx = self.data.index
        if len(idx) == 0:
            raise ValidationError("frame must contain at least one row")
        if not isinstance(idx, pd.DatetimeIndex):
            raise ValidationError("index must be a DatetimeIndex")
        deltas = np.diff(idx.values).astype("timedelta64[D]")
        if len(deltas) and not np.all(deltas == np.timedelta64(1, "D")):
            bad = idx[1:][deltas != np.timedelta64(1, "D")]
            raise ValidationError(f"dates must increase by exactly one day; first break before {bad[0].date()}")
        if not self.data.columns.equals(self.mask.columns) or not self.data.index.equals(self.mask.index):
            raise ValidationError("mask must share the frame's index and columns")

    @property
    def columns(self):
        return list(self.data.columns)

    @property
    def dates(self):
        return self.data.index

    def __len__(self):
        return len(self.data)

    def column(self, name: str) -> np.ndarray:
        return self.data[name].to_numpy()

    def split(self, split_date) -> tuple:
        """(train, holdout): train covers dates <= split_date."""
        ts = pd.Timestamp(split_date)
        left = self.data.index <= ts
        if not left.any() or left.all():
            raise ValidationError(f"split date {ts.date()} not inside the data range")
        return (
            TimeSeriesFrame(self.data[left], self.mask[left]),
            TimeSeriesFrame(self.data[~left], self.mask[~left]),
        )


def ingest(path, forward_fill: bool = False) -> TimeSeriesFrame:
    """Parse a CSV with a ``date`` column plus numeric columns.

    Validates daily continuity and reports gaps; unparseable cells become
    masked NaNs with a warning. Forward-fill of masked cells is off by
    default.
    """
    # keep_default_na so tokens like "n/a" reach our own parsing and warning
    raw = pd.read_csv(path, dtype=str, keep_default_na=False)
    if "date" not in raw.columns:
        raise ValidationError(f"{path}: missing 'date' column")
    value_cols = [c for c in raw.columns if c != "date"]
    if not value_cols:
        raise ValidationError(f"{path}: need at least one value column")

    try:
        dates = pd.to_datetime(raw["date"], format="%Y-%m-%d")
    except (ValueError, TypeError) as exc:
        raise ValidationError(f"{path}: unparseable date: {exc}") from None

    dup = dates[dates.duplicated()]
    if len(dup):
        rows = [int(i) + 2 for i in dup.index[:5]]
        raise ValidationError(f"{path}: duplicate dates {sorted({d.date() for d in dup})} (rows {rows})")

    order = np.argsort(dates.values)
    dates = pd.DatetimeIndex(dates.values[order])
    deltas = np.diff(dates.values).astype("timedelta64[D]")
    gaps = np.where(deltas != np.timedelta64(1, "D"))[0]
    if len(gaps):
        missing_after = dates[gaps[0]].date()
        raise ValidationError(f"{path}: non-daily spacing; calendar gap after {missing_after}")

    values = {}
    mask = {}
    for col in value_cols:
        cells = raw[col].iloc[order]
        parsed = pd.to_numeric(cells, errors="coerce")
        bad = parsed.isna() & (cells.str.strip() != "")
        cell_missing = parsed.isna()
        if bad.any():
            rows = [int(i) + 2 for i in np.where(bad.to_numpy())[0][:5]]
            warnings.warn(f"{path}: column {col!r} has unparseable cells at rows {rows}; masked")
        values[col] = parsed.to_numpy()
        mask[col] = cell_missing.to_numpy()

    data = pd.DataFrame(values, index=dates)
    mframe = pd.DataFrame(mask, index=dates)
    if forward_fill:
        data = data.ffill()
    return TimeSeriesFrame(data, mframe)
