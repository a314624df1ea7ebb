"""
Skycast Evaluation - Metrics
Error, skill and rank-correlation scores over GHI values.
"""
import logging
import math
from typing import Dict, Iterable, Sequence

import numpy as np
from scipy.stats import rankdata

from ..errors import DataError

logger = logging.getLogger(__name__)


def _pair(true, pred):
    true = np.asarray(true, dtype=float).ravel()
    pred = np.asarray(pred, dtype=float).ravel()
    if true.shape != pred.shape:
        raise DataError(f"Length mismatch: {true.size} true vs {pred.size} predicted values")
    if true.size == 0:
        raise DataError("Metric needs at least one value")
    return true, pred


def mae(true, pred) -> float:
    """Mean absolute error, compensated summation."""
    true, pred = _pair(true, pred)
    return math.fsum(np.abs(true - pred)) / true.size


def rmse(true, pred) -> float:
    """Root of the mean squared error."""
    true, pred = _pair(true, pred)
    return math.sqrt(math.fsum((true - pred) ** 2) / true.size)


def nmap(true, pred) -> float:
    """Mean absolute error as a percentage of the mean true value."""
    true, pred = _pair(true, pred)
    mean_true = math.fsum(true) / true.size
    if mean_true <= 0:
        raise DataError(f"nMAP needs a positive mean observation, got {mean_true}")
    return 100.0 * mae(true, pred) / mean_true


def forecast_skill(err_model: float, err_poc: float) -> float:
    """1 - err_model / err_poc."""
    if not err_poc > 0:
        raise DataError(f"Forecast skill needs a positive baseline error, got {err_poc}")
    return 1.0 - err_model / err_poc


def spearman(x, y) -> float:
    """
    Rank correlation with average ranks for ties.

    Returns NaN when either argument has zero rank variance.
    """
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape:
        raise DataError(f"Length mismatch: {x.size} vs {y.size}")
    if x.size < 2:
        raise DataError("Spearman correlation needs at least two pairs")
    rx, ry = rankdata(x), rankdata(y)
    dx, dy = rx - rx.mean(), ry - ry.mean()
    denom = math.sqrt(math.fsum(dx * dx) * math.fsum(dy * dy))
    if denom == 0.0:
        logger.debug("Spearman undefined: zero rank variance")
        return math.nan
    return math.fsum(dx * dy) / denom


def autocorrelation_profile(series, lags: Iterable[int]) -> Dict[int, float]:
    """
    Spearman correlation of the series with itself shifted by each lag.

    Negative lags mirror positive ones. Pairs with a missing value are
    dropped.

    Raises:
        DataError: a lag is not shorter than the series
    """
    values = np.asarray(series, dtype=float).ravel()
    n = values.size
    profile = {}
    for lag in lags:
        k = abs(int(lag))
        if k >= n:
            raise DataError(f"Lag {lag} needs a series longer than {n} values")
        a, b = values[:n - k], values[k:]
        keep = ~(np.isnan(a) | np.isnan(b))
        profile[int(lag)] = spearman(a[keep], b[keep]) if keep.sum() >= 2 else math.nan
    return profile


def score_row(true: Sequence[float], pred: Sequence[float], poc: Sequence[float], fss_metric: str = "mae") -> Dict[str, float]:
    """
    Model and POC scores over one group of records.

    FSS is 0 when both errors are 0 and NaN when only the baseline is exact.
    """
    true, pred = _pair(true, pred)
    _, poc = _pair(true, poc)
    row = {
        "count": int(true.size),
        "mae": mae(true, pred),
        "rmse": rmse(true, pred),
        "poc_mae": mae(true, poc),
        "poc_rmse": rmse(true, poc),
    }
    mean_true = true.mean()
    row["nmap"] = nmap(true, pred) if mean_true > 0 else math.nan
    row["poc_nmap"] = nmap(true, poc) if mean_true > 0 else math.nan
    model_err, poc_err = row[fss_metric], row[f"poc_{fss_metric}"]
    if poc_err > 0:
        row["fss"] = forecast_skill(model_err, poc_err)
    else:
        row["fss"] = 0.0 if model_err == 0 else math.nan
    return row
