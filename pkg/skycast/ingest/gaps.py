"""
Skycast Ingest - Gaps
Missing-data intervals over the required columns.
"""
import logging
from typing import List, Sequence

import numpy as np
import pandas as pd

from ..errors import DataError
from ..schema.series import GapReport, TimeSeriesTable

logger = logging.getLogger(__name__)


def missing_mask(table: TimeSeriesTable, required_columns: Sequence[str]) -> np.ndarray:
    unknown = [c for c in required_columns if c not in table]
    if unknown:
        raise DataError(f"Unknown required columns: {unknown}")
    if not required_columns:
        return np.zeros(len(table), dtype=bool)
    values = table.select(list(required_columns)).to_frame().to_numpy()
    return np.isnan(values).any(axis=1)


def detect_gaps(table: TimeSeriesTable, required_columns: Sequence[str]) -> GapReport:
    """
    Maximal runs of rows where any required column is missing.

    Args:
        table: input table
        required_columns: columns that must be present

    Returns:
        GapReport with inclusive [start, end] intervals, sorted and disjoint
    """
    required_columns = list(required_columns)
    mask = missing_mask(table, required_columns)
    if len(mask) == 0 or not mask.any():
        return GapReport([], [], 1.0)

    frame = table.select(required_columns).to_frame()
    timestamps = table.timestamps
    edges = np.diff(np.concatenate([[0], mask.astype(np.int8), [0]]))
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1) - 1

    intervals = []
    affected: List[List[str]] = []
    for s, e in zip(starts, ends):
        intervals.append((timestamps[s], timestamps[e]))
        block = frame.iloc[s:e + 1]
        affected.append([c for c in required_columns if block[c].isna().any()])

    coverage = 1.0 - float(mask.sum()) / len(mask)
    logger.info(f"📊 {len(intervals)} gap intervals, coverage {coverage:.4f}")
    return GapReport(intervals, affected, coverage)


def gap_profile(gaps: GapReport, table: TimeSeriesTable) -> pd.DataFrame:
    """
    Fraction of rows missing per UTC hour of day.

    Shows recurring outages such as an imager that stops every day at
    the same hour.
    """
    timestamps = table.timestamps
    inside = gaps.mask(timestamps)
    hours = timestamps.hour
    frame = pd.DataFrame({"hour_utc": hours, "missing": inside})
    profile = frame.groupby("hour_utc")["missing"].agg(["sum", "count"])
    profile = profile.reindex(range(24), fill_value=0)
    profile["missing_fraction"] = np.where(profile["count"] > 0, profile["sum"] / profile["count"].clip(lower=1), 0.0)
    profile = profile.rename(columns={"sum": "missing_rows", "count": "rows"})
    return profile.reset_index()
