"""
Skycast Evaluation - Strata
Sky-condition stratification of per-forecast errors by cloud cover at t0.
"""
import logging
from typing import List

import numpy as np
import pandas as pd

from ..errors import ConfigError
from ..schema.evaluation import StratumSummary

logger = logging.getLogger(__name__)

CLEAR = "Clear"
PARTLY = "Partially Cloudy"
OVERCAST = "Overcast"
UNKNOWN = "Unknown"
QUANTILES = (5, 25, 50, 75, 95)


def classify(cover, clear_max: float = 20.0, overcast_min: float = 80.0) -> np.ndarray:
    """Clear below `clear_max`, Overcast at or above `overcast_min`, Partially Cloudy between."""
    if clear_max > overcast_min:
        raise ConfigError(f"clear_max ({clear_max}) must not exceed overcast_min ({overcast_min})")
    cover = np.asarray(cover, dtype=float)
    labels = np.full(cover.shape, PARTLY, dtype=object)
    labels[cover < clear_max] = CLEAR
    labels[cover >= overcast_min] = OVERCAST
    labels[np.isnan(cover)] = UNKNOWN
    return labels


def forecast_errors(records: pd.DataFrame) -> pd.DataFrame:
    """One row per forecast (t0): MAE over its horizons and cover at t0."""
    frame = records.assign(abs_err=(records["ghi_true"] - records["ghi_pred"]).abs())
    return frame.groupby("t0", sort=True).agg(mae=("abs_err", "mean"), cloud_cover_pct=("cloud_cover_pct", "first"))


def stratify(records: pd.DataFrame, clear_max: float = 20.0, overcast_min: float = 80.0) -> List[StratumSummary]:
    """
    Per-stratum distribution of per-forecast MAE.

    Fractions are over all forecasts and sum to 1; forecasts without a
    cover value form an `Unknown` stratum when present.
    """
    per_forecast = forecast_errors(records)
    labels = classify(per_forecast["cloud_cover_pct"].to_numpy(), clear_max, overcast_min)
    total = len(per_forecast)
    names = [CLEAR, PARTLY, OVERCAST] + ([UNKNOWN] if (labels == UNKNOWN).any() else [])

    strata = []
    for name in names:
        errors = per_forecast["mae"].to_numpy()[labels == name]
        count = int(errors.size)
        quantiles = {f"p{q}": float(np.percentile(errors, q)) for q in QUANTILES} if count else {}
        strata.append(StratumSummary(
            name=name,
            count=count,
            fraction=count / total if total else 0.0,
            quantiles=quantiles,
            mean_mae=float(errors.mean()) if count else float("nan"),
        ))
    logger.debug("Strata: " + ", ".join(f"{s.name}={s.count}" for s in strata))
    return strata
