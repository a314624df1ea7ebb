"""
Skycast Schema - Series
Timestamp-indexed tables, gap reports and forecast windows.
"""
import hashlib
import json
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..errors import DataError
from .targets import DecodeContext


class TimeSeriesTable:
    """
    Regular-grid table of named real-valued columns.

    Missing entries are stored as NaN. The table is immutable: every
    accessor returns a copy and every transform returns a new table.
    """

    def __init__(self, frame: pd.DataFrame, cadence_s: int):
        if int(cadence_s) <= 0:
            raise DataError(f"cadence_s must be a positive integer, got {cadence_s}")
        if not isinstance(frame.index, pd.DatetimeIndex):
            raise DataError("TimeSeriesTable index must be a DatetimeIndex")
        if len(set(frame.columns)) != len(frame.columns):
            raise DataError(f"Duplicate column names: {list(frame.columns)}")

        index = frame.index
        if index.tz is None:
            index = index.tz_localize("UTC")
        else:
            index = index.tz_convert("UTC")

        if len(index) > 1:
            steps = np.diff(index.asi8)
            expected = int(cadence_s) * 1_000_000_000
            if np.any(steps <= 0):
                raise DataError("Timestamps must be strictly increasing")
            if np.any(steps != expected):
                raise DataError(f"Timestamps must be spaced exactly {cadence_s} s apart")

        data = frame.copy()
        data.index = index
        data.index.name = "timestamp"
        self._frame = data.astype("float64")
        self.cadence_s = int(cadence_s)

    @classmethod
    def from_columns(
        cls,
        timestamps: Sequence,
        columns: Mapping[str, Iterable[float]],
        cadence_s: int,
    ) -> "TimeSeriesTable":
        index = pd.DatetimeIndex(pd.to_datetime(list(timestamps), utc=True))
        return cls(pd.DataFrame(_checked_columns(columns, len(index)), index=index), cadence_s)

    @classmethod
    def regular(cls, start, periods: int, cadence_s: int, columns: Mapping[str, np.ndarray]) -> "TimeSeriesTable":
        """Builds a table on a regular grid starting at `start`."""
        index = pd.date_range(_utc(start), periods=periods, freq=pd.Timedelta(seconds=cadence_s))
        return cls(pd.DataFrame(_checked_columns(columns, periods), index=index), cadence_s)

    @property
    def timestamps(self) -> pd.DatetimeIndex:
        return self._frame.index.copy()

    @property
    def column_names(self) -> List[str]:
        return list(self._frame.columns)

    def __len__(self) -> int:
        return len(self._frame)

    def __contains__(self, name: str) -> bool:
        return name in self._frame.columns

    def column(self, name: str) -> np.ndarray:
        if name not in self._frame.columns:
            raise DataError(f"Unknown column '{name}'")
        return self._frame[name].to_numpy(dtype=float, copy=True)

    def missing(self, name: str) -> np.ndarray:
        return np.isnan(self.column(name))

    def to_frame(self) -> pd.DataFrame:
        return self._frame.copy()

    def with_columns(self, columns: Mapping[str, np.ndarray]) -> "TimeSeriesTable":
        frame = self._frame.copy()
        for name, values in columns.items():
            values = np.asarray(values, dtype=float)
            if values.shape != (len(frame),):
                raise DataError(f"Column '{name}' has shape {values.shape}, expected ({len(frame)},)")
            frame[name] = values
        return TimeSeriesTable(frame, self.cadence_s)

    def select(self, names: Sequence[str]) -> "TimeSeriesTable":
        unknown = [n for n in names if n not in self._frame.columns]
        if unknown:
            raise DataError(f"Unknown columns: {unknown}")
        return TimeSeriesTable(self._frame[list(names)], self.cadence_s)

    def between(self, start, end) -> "TimeSeriesTable":
        """Rows with start <= timestamp < end."""
        start, end = _utc(start), _utc(end)
        index = self._frame.index
        return TimeSeriesTable(self._frame[(index >= start) & (index < end)], self.cadence_s)

    def equals(self, other: "TimeSeriesTable") -> bool:
        if self.cadence_s != other.cadence_s or self.column_names != other.column_names:
            return False
        if not self._frame.index.equals(other._frame.index):
            return False
        a, b = self._frame.to_numpy(), other._frame.to_numpy()
        return bool(np.array_equal(np.isnan(a), np.isnan(b)) and np.array_equal(a[~np.isnan(a)], b[~np.isnan(b)]))

    def __repr__(self) -> str:
        return f"TimeSeriesTable(rows={len(self)}, columns={len(self.column_names)}, cadence_s={self.cadence_s})"


@dataclass
class GapReport:
    """Maximal runs of rows where at least one required column is missing."""
    intervals: List[Tuple[pd.Timestamp, pd.Timestamp]] = field(default_factory=list)
    affected_columns: List[List[str]] = field(default_factory=list)
    coverage_fraction: float = 1.0

    def mask(self, timestamps: pd.DatetimeIndex) -> np.ndarray:
        """Boolean row mask of timestamps that fall inside any interval."""
        values = timestamps.asi8
        inside = np.zeros(len(values), dtype=bool)
        for start, end in self.intervals:
            lo = np.searchsorted(values, start.value, side="left")
            hi = np.searchsorted(values, end.value, side="right")
            inside[lo:hi] = True
        return inside

    def to_dict(self) -> Dict:
        return {
            "intervals": [[s.isoformat(), e.isoformat()] for s, e in self.intervals],
            "affected_columns": self.affected_columns,
            "coverage_fraction": self.coverage_fraction,
        }


@dataclass
class Window:
    """One sample: input block, GHI targets and the decode context."""
    t0: pd.Timestamp
    inputs: np.ndarray
    target: np.ndarray
    context: DecodeContext
    cloud_cover_pct: Optional[float] = None


@dataclass
class WindowArrays:
    """Stacked view of a WindowSet for vectorized training and evaluation."""
    t0: pd.DatetimeIndex
    inputs: np.ndarray
    target_ghi: np.ndarray
    ghi_0: np.ndarray
    csi_0: np.ndarray
    ghi_cs: np.ndarray
    cloud_cover: np.ndarray

    def __len__(self) -> int:
        return len(self.t0)

    def take(self, indices: np.ndarray) -> "WindowArrays":
        indices = np.asarray(indices)
        return WindowArrays(
            t0=self.t0[indices],
            inputs=self.inputs[indices],
            target_ghi=self.target_ghi[indices],
            ghi_0=self.ghi_0[indices],
            csi_0=self.csi_0[indices],
            ghi_cs=self.ghi_cs[indices],
            cloud_cover=self.cloud_cover[indices],
        )


@dataclass
class WindowSet:
    windows: List[Window]
    input_len: int
    input_spacing_s: int
    horizon_offsets: List[int]
    feature_names: List[str]

    def __len__(self) -> int:
        return len(self.windows)

    @property
    def t0s(self) -> pd.DatetimeIndex:
        return pd.DatetimeIndex([w.t0 for w in self.windows], tz="UTC") if self.windows else pd.DatetimeIndex([], tz="UTC")

    def subset(self, keep) -> "WindowSet":
        return WindowSet([w for w, k in zip(self.windows, keep) if k], self.input_len,
                         self.input_spacing_s, list(self.horizon_offsets), list(self.feature_names))

    def arrays(self) -> WindowArrays:
        n, t, f, h = len(self.windows), self.input_len, len(self.feature_names), len(self.horizon_offsets)
        if n == 0:
            return WindowArrays(pd.DatetimeIndex([], tz="UTC"), np.zeros((0, t, f)), np.zeros((0, h)),
                                np.zeros(0), np.zeros(0), np.zeros((0, h)), np.zeros(0))
        return WindowArrays(
            t0=self.t0s,
            inputs=np.stack([w.inputs for w in self.windows]),
            target_ghi=np.stack([w.target for w in self.windows]),
            ghi_0=np.array([w.context.ghi_0 for w in self.windows]),
            csi_0=np.array([w.context.csi_0 for w in self.windows]),
            ghi_cs=np.stack([w.context.ghi_cs_horizons for w in self.windows]),
            cloud_cover=np.array([np.nan if w.cloud_cover_pct is None else w.cloud_cover_pct for w in self.windows]),
        )

    def schema_hash(self) -> str:
        payload = {
            "input_len": self.input_len,
            "input_spacing_s": self.input_spacing_s,
            "horizon_offsets": list(self.horizon_offsets),
            "feature_names": list(self.feature_names),
        }
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


def _utc(value) -> pd.Timestamp:
    ts = pd.Timestamp(value)
    return ts.tz_localize("UTC") if ts.tzinfo is None else ts.tz_convert("UTC")


def _checked_columns(columns: Mapping[str, Iterable[float]], rows: int) -> Dict[str, np.ndarray]:
    data = {}
    for name, values in columns.items():
        values = np.asarray(list(values) if not isinstance(values, np.ndarray) else values, dtype=float)
        if values.shape != (rows,):
            raise DataError(f"Column '{name}' has {values.size} entries, expected {rows}")
        data[name] = values
    return data
