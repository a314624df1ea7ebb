"""
Skycast Ingest - CSV
Station exports in, regular-grid TimeSeriesTables out (and back).
"""
import json
import logging
import os
from typing import Dict, Mapping, Optional

import numpy as np
import pandas as pd

from ..config import Config
from ..errors import ConfigError, DataError
from ..schema.series import TimeSeriesTable

logger = logging.getLogger(__name__)

TIMESTAMP_COLUMN = "timestamp"
MISSING_TOKENS = ["", "NaN"]


def load_column_mapping(path: Optional[str] = None) -> Dict[str, str]:
    """
    Display name -> canonical snake_case column name.

    The shipped table covers every raw and clear-sky column of the
    feature catalog; canonical names map to themselves as well.
    """
    path = path or Config.COLUMN_MAPPING
    if not os.path.exists(path):
        raise ConfigError(f"Column mapping not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        data = json.load(f)
    mapping = dict(data.get("columns", data))
    for canonical in list(mapping.values()):
        mapping.setdefault(canonical, canonical)
    return mapping


def parse_csv(
    path: str,
    schema: Optional[Mapping[str, str]] = None,
    cadence_s: int = 60,
    strict: bool = False,
) -> TimeSeriesTable:
    """
    Parses a station CSV into a regular-grid table.

    Args:
        path: CSV file with a header row and a `timestamp` column (ISO-8601, UTC)
        schema: header -> canonical column name; None keeps headers as they are
        cadence_s: grid spacing in seconds
        strict: reject headers that the schema does not know

    Returns:
        TimeSeriesTable spanning min..max timestamp; absent rows are all-missing
    """
    if not os.path.exists(path):
        raise DataError(f"CSV file not found: {path}")
    if cadence_s <= 0:
        raise ConfigError(f"cadence_s must be positive, got {cadence_s}")

    try:
        frame = pd.read_csv(
            path,
            dtype={TIMESTAMP_COLUMN: str},
            na_values=MISSING_TOKENS,
            keep_default_na=False,
            float_precision="round_trip",
        )
    except pd.errors.EmptyDataError:
        raise DataError(f"{path}: file is empty (no header row)")
    except pd.errors.ParserError as e:
        raise DataError(f"{path}: {e}")

    if TIMESTAMP_COLUMN not in frame.columns:
        raise DataError(f"{path}: header has no '{TIMESTAMP_COLUMN}' column")

    # File line of data row i (header is line 1)
    lines = np.arange(len(frame)) + 2

    raw_times = frame.pop(TIMESTAMP_COLUMN)
    times = pd.to_datetime(raw_times, utc=True, errors="coerce", format="ISO8601")
    bad = times.isna().to_numpy()
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise DataError(f"{path}: line {lines[i]}: malformed timestamp '{raw_times.iloc[i]}'")

    duplicated = times.duplicated().to_numpy()
    if duplicated.any():
        i = int(np.flatnonzero(duplicated)[0])
        raise DataError(f"{path}: line {lines[i]}: duplicate timestamp {times.iloc[i].isoformat()}")

    frame = frame.rename(columns=_column_names(list(frame.columns), schema, strict, path))

    for name in frame.columns:
        if frame[name].dtype == object:
            converted = pd.to_numeric(frame[name], errors="coerce")
            bad = converted.isna() & frame[name].notna()
            if bad.any():
                i = int(np.flatnonzero(bad.to_numpy())[0])
                raise DataError(f"{path}: line {lines[i]}: non-numeric value '{frame[name].iloc[i]}' in column '{name}'")
            frame[name] = converted

    frame.index = pd.DatetimeIndex(times)
    frame = frame.sort_index()

    if len(frame) == 0:
        raise DataError(f"{path}: no data rows")

    start, end = frame.index[0], frame.index[-1]
    offsets = (frame.index.asi8 - start.value) % (cadence_s * 1_000_000_000)
    if np.any(offsets != 0):
        i = int(np.flatnonzero(offsets)[0])
        raise DataError(f"{path}: timestamp {frame.index[i].isoformat()} is off the {cadence_s} s grid")

    grid = pd.date_range(start, end, freq=pd.Timedelta(seconds=cadence_s))
    frame = frame.reindex(grid).astype(float)

    table = TimeSeriesTable(frame, cadence_s)
    absent = len(grid) - len(times)
    logger.info(f"📊 Parsed {path}: {len(grid)} rows x {len(table.column_names)} columns ({absent} rows absent from file)")
    return table


def _column_names(headers, schema, strict, path) -> Dict[str, str]:
    if schema is None:
        return {h: h for h in headers}
    renames = {}
    unknown = []
    for header in headers:
        if header in schema:
            renames[header] = schema[header]
        elif strict:
            unknown.append(header)
        else:
            renames[header] = header
    if unknown:
        raise DataError(f"{path}: unknown columns under strict schema: {unknown}")
    targets = list(renames.values())
    clashes = sorted({t for t in targets if targets.count(t) > 1})
    if clashes:
        raise DataError(f"{path}: several headers map to the same column: {clashes}")
    return renames


def write_csv(table: TimeSeriesTable, path: str) -> str:
    """Inverse of parse_csv: ISO-8601 `Z` timestamps, missing entries as empty fields."""
    frame = table.to_frame()
    frame.index = frame.index.strftime("%Y-%m-%dT%H:%M:%SZ")
    frame.index.name = TIMESTAMP_COLUMN
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    frame.to_csv(path, na_rep="", float_format=None)
    logger.info(f"✅ Wrote {len(frame)} rows to {path}")
    return path


def load_column_groups(path: Optional[str] = None) -> Dict[str, list]:
    """Canonical raw column names by source: bms, camera, clear_sky."""
    with open(path or Config.COLUMN_MAPPING, "r", encoding="utf-8") as f:
        return json.load(f)["groups"]
