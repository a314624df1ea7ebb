"""
Skycast Evaluation - Report
Per-horizon tables, plot data and report files from forecast records.
"""
import json
import logging
import os
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np
import openpyxl
import pandas as pd
from openpyxl.styles import Font, PatternFill

from ..errors import DataError
from ..schema.evaluation import ForecastRecord, MetricsReport
from .metrics import score_row
from .strata import stratify

logger = logging.getLogger(__name__)

RECORD_COLUMNS = ["t0", "horizon_min", "ghi_true", "ghi_pred", "ghi_poc", "cloud_cover_pct"]
TABLE_COLUMNS = ["horizon_min", "count", "mae", "poc_mae", "rmse", "poc_rmse", "nmap", "poc_nmap", "fss"]


def records_from(t0, ghi_true: np.ndarray, ghi_pred: np.ndarray, ghi_poc: np.ndarray,
                 horizons_min: Sequence[int], cloud_cover: Optional[np.ndarray] = None) -> pd.DataFrame:
    """
    Long-form record table from (N, H) arrays.

    Args:
        t0: N forecast instants
        ghi_true / ghi_pred / ghi_poc: (N, H) GHI
        horizons_min: H horizon lengths in minutes
        cloud_cover: N cover values at t0, or None

    Returns:
        DataFrame with RECORD_COLUMNS, one row per (t0, horizon)
    """
    ghi_true = np.asarray(ghi_true, dtype=float)
    n, h = ghi_true.shape
    cover = np.full(n, np.nan) if cloud_cover is None else np.asarray(cloud_cover, dtype=float)
    return pd.DataFrame({
        "t0": np.repeat(pd.DatetimeIndex(t0), h),
        "horizon_min": np.tile(np.asarray(horizons_min, dtype=int), n),
        "ghi_true": ghi_true.ravel(),
        "ghi_pred": np.asarray(ghi_pred, dtype=float).ravel(),
        "ghi_poc": np.asarray(ghi_poc, dtype=float).ravel(),
        "cloud_cover_pct": np.repeat(cover, h),
    })


def records_frame(records) -> pd.DataFrame:
    """Accepts a record DataFrame or an iterable of ForecastRecord."""
    if isinstance(records, pd.DataFrame):
        missing = [c for c in RECORD_COLUMNS if c not in records.columns]
        if missing:
            raise DataError(f"Record table lacks columns {missing}")
        return records[RECORD_COLUMNS]
    rows = [{c: getattr(r, c) for c in RECORD_COLUMNS} for r in records]
    return pd.DataFrame(rows, columns=RECORD_COLUMNS)


def to_records(frame: pd.DataFrame) -> List[ForecastRecord]:
    return [ForecastRecord(**row) for row in frame[RECORD_COLUMNS].to_dict("records")]


def per_horizon_table(records, fss_metric: str = "mae") -> pd.DataFrame:
    """12 horizon rows plus an aggregate row over every record."""
    frame = records_frame(records)
    if frame.empty:
        raise DataError("No forecast records to score")
    rows = []
    for horizon, group in frame.groupby("horizon_min", sort=True):
        rows.append({"horizon_min": int(horizon), **score_row(group["ghi_true"], group["ghi_pred"], group["ghi_poc"], fss_metric)})
    rows.append({"horizon_min": "all", **score_row(frame["ghi_true"], frame["ghi_pred"], frame["ghi_poc"], fss_metric)})
    return pd.DataFrame(rows)[TABLE_COLUMNS]


def report(records, clear_max: float = 20.0, overcast_min: float = 80.0, fss_metric: str = "mae",
           clamped: int = 0) -> MetricsReport:
    """
    Scores records per horizon and overall, and stratifies by sky condition.

    Raises:
        DataError: no records
    """
    frame = records_frame(records)
    table = per_horizon_table(frame, fss_metric)
    rows = table.to_dict("records")
    result = MetricsReport(
        per_horizon=rows[:-1],
        aggregate={k: v for k, v in rows[-1].items() if k != "horizon_min"},
        strata=stratify(frame, clear_max, overcast_min),
        record_count=len(frame),
        fss_metric=fss_metric,
        clamped=clamped,
    )
    agg = result.aggregate
    logger.info(f"📊 MAE {agg['mae']:.2f} W/m² vs POC {agg['poc_mae']:.2f} W/m², FSS {agg['fss']:.3f} over {len(frame)} records")
    return result


def density_grid(records, bins: int = 50, max_ghi: Optional[float] = None) -> pd.DataFrame:
    """
    2-D true-vs-predicted densities per horizon for the model and POC.

    Returns:
        long DataFrame: horizon_min, source, true_lo, pred_lo, density
    """
    frame = records_frame(records)
    upper = max_ghi or float(np.nanmax(frame[["ghi_true", "ghi_pred", "ghi_poc"]].to_numpy())) or 1.0
    edges = np.linspace(0.0, upper, bins + 1)
    parts = []
    for horizon, group in frame.groupby("horizon_min", sort=True):
        for source, column in (("model", "ghi_pred"), ("poc", "ghi_poc")):
            hist, _, _ = np.histogram2d(group["ghi_true"], group[column], bins=[edges, edges], density=True)
            ti, pi = np.nonzero(hist)
            parts.append(pd.DataFrame({
                "horizon_min": int(horizon),
                "source": source,
                "true_lo": edges[ti],
                "pred_lo": edges[pi],
                "density": hist[ti, pi],
            }))
    if not parts:
        return pd.DataFrame(columns=["horizon_min", "source", "true_lo", "pred_lo", "density"])
    return pd.concat(parts, ignore_index=True)


def day_overlays(records, horizons: Optional[Iterable[int]] = None) -> pd.DataFrame:
    """
    True, predicted and POC GHI per valid time, for per-day overlay plots.

    Returns:
        DataFrame: date, valid_time, horizon_min, ghi_true, ghi_pred, ghi_poc
    """
    frame = records_frame(records)
    if horizons is not None:
        frame = frame[frame["horizon_min"].isin(list(horizons))]
    valid = pd.DatetimeIndex(frame["t0"]) + pd.to_timedelta(frame["horizon_min"].to_numpy(), unit="min")
    out = pd.DataFrame({
        "date": valid.date,
        "valid_time": valid,
        "horizon_min": frame["horizon_min"].to_numpy(),
        "ghi_true": frame["ghi_true"].to_numpy(),
        "ghi_pred": frame["ghi_pred"].to_numpy(),
        "ghi_poc": frame["ghi_poc"].to_numpy(),
    })
    return out.sort_values(["horizon_min", "valid_time"]).reset_index(drop=True)


def strata_frame(result: MetricsReport) -> pd.DataFrame:
    return pd.DataFrame([
        {"stratum": s.name, "count": s.count, "fraction": s.fraction, "mean_mae": s.mean_mae, **s.quantiles}
        for s in result.strata
    ])


def _sheet(wb, title: str, frame: pd.DataFrame):
    ws = wb.create_sheet(title)
    ws.append([str(c) for c in frame.columns])
    for cell in ws[1]:
        cell.font = Font(bold=True)
        cell.fill = PatternFill(start_color="DDEBF7", end_color="DDEBF7", fill_type="solid")
    for row in frame.itertuples(index=False):
        ws.append([None if isinstance(v, float) and np.isnan(v) else (v.item() if hasattr(v, "item") else v) for v in row])


def write_workbook(result: MetricsReport, path: str, extra: Optional[Dict[str, pd.DataFrame]] = None) -> str:
    """Excel workbook with the per-horizon table, strata and any extra tables."""
    wb = openpyxl.Workbook()
    wb.remove(wb.active)
    _sheet(wb, "per_horizon", result.table()[TABLE_COLUMNS])
    _sheet(wb, "strata", strata_frame(result))
    for title, frame in (extra or {}).items():
        _sheet(wb, title[:31], frame)
    wb.save(path)
    logger.info(f"✅ Workbook saved to {path}")
    return path


def write_report(result: MetricsReport, out_dir: str, records=None, density_bins: int = 50) -> List[str]:
    """
    Writes metrics.json, per_horizon.csv, strata.csv and report.xlsx, plus
    density.csv and overlays.csv when records are given.

    Returns:
        written paths
    """
    os.makedirs(out_dir, exist_ok=True)
    paths = []

    def out(name: str) -> str:
        path = os.path.join(out_dir, name)
        paths.append(path)
        return path

    with open(out("metrics.json"), "w", encoding="utf-8") as f:
        json.dump(result.to_dict(), f, indent=2, default=float)
    result.table()[TABLE_COLUMNS].to_csv(out("per_horizon.csv"), index=False)
    strata_frame(result).to_csv(out("strata.csv"), index=False)
    if records is not None:
        density_grid(records, density_bins).to_csv(out("density.csv"), index=False)
        day_overlays(records).to_csv(out("overlays.csv"), index=False)
    write_workbook(result, out("report.xlsx"))
    return paths
