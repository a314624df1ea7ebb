"""
Skycast Schema - Evaluation
Forecast records and the metrics report built from them.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import math

import pandas as pd


@dataclass
class ForecastRecord:
    t0: pd.Timestamp
    horizon_min: int
    ghi_true: float
    ghi_pred: float
    ghi_poc: float
    cloud_cover_pct: float = math.nan

    def to_dict(self) -> Dict[str, Any]:
        return {
            "t0": self.t0.isoformat(),
            "horizon_min": self.horizon_min,
            "ghi_true": self.ghi_true,
            "ghi_pred": self.ghi_pred,
            "ghi_poc": self.ghi_poc,
            "cloud_cover_pct": self.cloud_cover_pct,
        }


@dataclass
class StratumSummary:
    """Per-forecast MAE distribution for one sky condition."""
    name: str
    count: int
    fraction: float
    quantiles: Dict[str, float] = field(default_factory=dict)
    mean_mae: float = math.nan


@dataclass
class MetricsReport:
    """
    Per-horizon and aggregate scores.

    `per_horizon` rows hold horizon_min, count, mae, rmse, nmap, fss and
    the matching poc_* values; `aggregate` is the same row over all records.
    """
    per_horizon: List[Dict[str, Any]]
    aggregate: Dict[str, Any]
    strata: List[StratumSummary] = field(default_factory=list)
    record_count: int = 0
    fss_metric: str = "mae"
    clamped: int = 0

    def table(self) -> pd.DataFrame:
        rows = list(self.per_horizon) + [dict(self.aggregate, horizon_min="all")]
        return pd.DataFrame(rows)

    def horizon(self, minutes: int) -> Dict[str, Any]:
        for row in self.per_horizon:
            if row["horizon_min"] == minutes:
                return row
        raise KeyError(minutes)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "record_count": self.record_count,
            "fss_metric": self.fss_metric,
            "clamped": self.clamped,
            "aggregate": self.aggregate,
            "per_horizon": self.per_horizon,
            "strata": [
                {"name": s.name, "count": s.count, "fraction": s.fraction, "mean_mae": s.mean_mae, "quantiles": s.quantiles}
                for s in self.strata
            ],
        }
