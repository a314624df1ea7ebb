"""
Skycast Ingest - Windows
Complete-sequence input/output windows for training and evaluation.
"""
import logging
from typing import List, Optional, Sequence

import numpy as np

from ..errors import ConfigError, DataError
from ..features.transforms import clear_sky_index
from ..schema.series import GapReport, TimeSeriesTable, Window, WindowSet
from ..schema.targets import DecodeContext
from .gaps import missing_mask

logger = logging.getLogger(__name__)

DEFAULT_HORIZONS_S = [600 * h for h in range(1, 13)]


def build_windows(
    table: TimeSeriesTable,
    gaps: GapReport,
    T: int,
    spacing_s: int = 600,
    horizons_s: Sequence[int] = DEFAULT_HORIZONS_S,
    daylight_min_ghi_cs: Optional[float] = 10.0,
    feature_names: Optional[Sequence[str]] = None,
    target_column: str = "ghi",
    clear_sky_column: str = "ghi_cs",
    stride_s: Optional[int] = None,
    cover_column: Optional[str] = None,
    csi_eps: float = 10.0,
    csi_ceiling: float = 2.0,
) -> WindowSet:
    """
    Emits every window whose input and horizon span is gap-free.

    A window at t0 reads T rows spaced `spacing_s` apart ending at t0 and
    the target column at t0 + each horizon. The whole span from the first
    input row to the last horizon must be free of gaps and missing values.
    With `daylight_min_ghi_cs` set, clear-sky GHI must exceed it at t0 and
    at every horizon.

    Args:
        table: engineered table holding features, target and clear-sky GHI
        gaps: intervals to avoid (usually detect_gaps on the same columns)
        T: input length
        spacing_s: spacing of input rows, a multiple of the table cadence
        horizons_s: strictly increasing horizon offsets in seconds
        daylight_min_ghi_cs: clear-sky GHI threshold, None disables the rule
        feature_names: input columns in order, default all table columns
        target_column: measured GHI column
        clear_sky_column: clear-sky GHI column
        stride_s: t0 spacing aligned to the epoch, default the table cadence
        cover_column: cloud cover carried into each window, if present

    Returns:
        WindowSet, empty when T or the horizons exceed the table span
    """
    cadence = table.cadence_s
    horizons_s = [int(h) for h in horizons_s]
    feature_names = list(table.column_names if feature_names is None else feature_names)

    if T < 1:
        raise ConfigError(f"T must be >= 1, got {T}")
    if spacing_s <= 0 or spacing_s % cadence:
        raise ConfigError(f"spacing_s={spacing_s} is not a positive multiple of the cadence {cadence} s")
    if not horizons_s or any(h <= 0 or h % cadence for h in horizons_s):
        raise ConfigError(f"horizons must be positive multiples of {cadence} s, got {horizons_s}")
    if any(b <= a for a, b in zip(horizons_s, horizons_s[1:])):
        raise ConfigError(f"horizons must be strictly increasing, got {horizons_s}")
    stride_s = cadence if stride_s is None else int(stride_s)
    if stride_s <= 0 or stride_s % cadence:
        raise ConfigError(f"stride_s={stride_s} is not a positive multiple of the cadence {cadence} s")
    for name in [target_column, clear_sky_column]:
        if name not in table:
            raise DataError(f"Window building needs column '{name}'")

    empty = WindowSet([], T, spacing_s, horizons_s, feature_names)
    n = len(table)
    step = spacing_s // cadence
    ahead = np.array(horizons_s) // cadence
    lookback = (T - 1) * step
    first, last = lookback, n - 1 - int(ahead[-1])
    if last < first:
        logger.warning(f"⚠️ T={T} with horizons up to {horizons_s[-1]} s exceeds the table span ({n} rows)")
        return empty

    required = list(dict.fromkeys(feature_names + [target_column, clear_sky_column]))
    bad = missing_mask(table, required) | gaps.mask(table.timestamps)
    prefix = np.concatenate([[0], np.cumsum(bad)])

    idx = np.arange(first, last + 1)
    clean = (prefix[idx + int(ahead[-1]) + 1] - prefix[idx - lookback]) == 0

    ghi = table.column(target_column)
    ghi_cs = table.column(clear_sky_column)
    keep = clean
    if daylight_min_ghi_cs is not None:
        cs_window = np.column_stack([ghi_cs[idx]] + [ghi_cs[idx + a] for a in ahead])
        keep = keep & np.all(cs_window > daylight_min_ghi_cs, axis=1)
    if stride_s != cadence:
        seconds = table.timestamps.asi8[idx] // 1_000_000_000
        keep = keep & (seconds % stride_s == 0)

    idx = idx[keep]
    if len(idx) == 0:
        return empty

    values = table.select(feature_names).to_frame().to_numpy() if feature_names else np.zeros((n, 0))
    offsets = np.arange(-lookback, 1, step)
    inputs = values[idx[:, None] + offsets[None, :]]
    targets = ghi[idx[:, None] + ahead[None, :]]
    cs_h = ghi_cs[idx[:, None] + ahead[None, :]]
    ghi_0 = ghi[idx]
    csi_0 = clear_sky_index(ghi_0, ghi_cs[idx], csi_eps, csi_ceiling)
    if cover_column and cover_column in table:
        cover = table.column(cover_column)[idx]
    else:
        cover = np.full(len(idx), np.nan)

    timestamps = table.timestamps[idx]
    windows: List[Window] = [
        Window(
            t0=timestamps[j],
            inputs=inputs[j],
            target=targets[j],
            context=DecodeContext(float(ghi_0[j]), float(csi_0[j]), cs_h[j]),
            cloud_cover_pct=None if np.isnan(cover[j]) else float(cover[j]),
        )
        for j in range(len(idx))
    ]
    logger.info(f"📊 Built {len(windows)} windows (T={T}, F={len(feature_names)}, {len(horizons_s)} horizons)")
    return WindowSet(windows, T, spacing_s, horizons_s, feature_names)
