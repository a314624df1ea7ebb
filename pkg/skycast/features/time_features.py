"""
Skycast Features - Time
Time of day/year, time relative to sun events, and cyclic encodings.
"""
import math
from typing import Tuple

import numpy as np
import pandas as pd

from ..errors import DataError
from ..geometry.solar import local_solar_date, sun_events
from ..schema.site import SiteConfig, SunEvents

SECONDS_PER_DAY = 86400.0
MILESTONES = ("sunrise", "solar_noon", "sunset")


def _ts(t) -> pd.Timestamp:
    ts = pd.Timestamp(t)
    return ts.tz_localize("UTC") if ts.tzinfo is None else ts.tz_convert("UTC")


def time_of_day(t) -> float:
    """(hours + minutes/60 + seconds/3600) / 24"""
    ts = _ts(t)
    return (ts.hour + ts.minute / 60.0 + ts.second / 3600.0) / 24.0


def time_of_year(t) -> float:
    """(day of year + time of day) / 365, day of year counted from 1."""
    ts = _ts(t)
    return (ts.dayofyear + time_of_day(ts)) / 365.0


def time_milestones(t, ev: SunEvents) -> Tuple[float, float, float]:
    """Signed (t - sunrise, t - solar noon, t - sunset) in fractional days."""
    if not ev.rises:
        raise DataError(f"No sunrise/sunset on {ev.date} (polar {ev.polar})")
    ts = _ts(t)
    return tuple((ts - event).total_seconds() / SECONDS_PER_DAY for event in (ev.sunrise, ev.solar_noon, ev.sunset))


def cyclic_encode(x, period: float, literal: bool = False):
    """
    (sin, cos) of x over one period.

    `literal` drops the 2*pi factor and returns (sin(x), cos(x)).
    """
    if period <= 0:
        raise DataError(f"period must be > 0, got {period}")
    angle = np.asarray(x, dtype=float) if literal else 2.0 * math.pi * np.asarray(x, dtype=float) / period
    s, c = np.sin(angle), np.cos(angle)
    if s.ndim == 0:
        return float(s), float(c)
    return s, c


# Vectorized forms used by the feature assembler

def time_of_day_series(index: pd.DatetimeIndex) -> np.ndarray:
    return np.asarray((index.hour + index.minute / 60.0 + index.second / 3600.0) / 24.0, dtype=float)


def time_of_year_series(index: pd.DatetimeIndex) -> np.ndarray:
    return np.asarray(index.dayofyear, dtype=float) / 365.0 + time_of_day_series(index) / 365.0


def _solar_days(index: pd.DatetimeIndex, site: SiteConfig):
    """Factorized local solar dates and their sun events."""
    shifted = index + pd.Timedelta(hours=site.longitude / 15.0)
    codes, days = pd.factorize(shifted.normalize())
    return codes, [sun_events(day.date(), site) for day in days]


def milestone_series(index: pd.DatetimeIndex, site: SiteConfig, event: str) -> np.ndarray:
    """time_milestones component `event` for every row, one sun_events lookup per solar day."""
    if event not in MILESTONES:
        raise DataError(f"Unknown milestone '{event}', expected one of {MILESTONES}")
    codes, events = _solar_days(index, site)
    for ev in events:
        if not ev.rises:
            raise DataError(f"No sunrise/sunset on {ev.date} at latitude {site.latitude} (polar {ev.polar})")
    ref = np.array([getattr(ev, event).value for ev in events], dtype=np.int64)
    return (index.asi8 - ref[codes]) / 1e9 / SECONDS_PER_DAY


def flag_series(index: pd.DatetimeIndex, site: SiteConfig, condition: str) -> np.ndarray:
    """1.0 while the sun is up (`day`) or before solar noon (`before_noon`), else 0.0."""
    codes, events = _solar_days(index, site)
    values = index.asi8
    if condition == "before_noon":
        noon = np.array([ev.solar_noon.value for ev in events], dtype=np.int64)
        return (values < noon[codes]).astype(float)
    if condition == "day":
        big = np.iinfo(np.int64).max
        rise = np.array([ev.sunrise.value if ev.rises else (np.iinfo(np.int64).min if ev.polar == "day" else big)
                         for ev in events], dtype=np.int64)
        sets = np.array([ev.sunset.value if ev.rises else (big if ev.polar == "day" else np.iinfo(np.int64).min)
                         for ev in events], dtype=np.int64)
        return ((values >= rise[codes]) & (values < sets[codes])).astype(float)
    raise DataError(f"Unknown flag condition '{condition}'")


__all__ = [
    "time_of_day",
    "time_of_year",
    "time_milestones",
    "cyclic_encode",
    "local_solar_date",
    "time_of_day_series",
    "time_of_year_series",
    "milestone_series",
    "flag_series",
]
