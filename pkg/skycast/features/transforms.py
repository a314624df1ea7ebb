"""
Skycast Features - Transforms
Column transforms: clear-sky index, lags, trailing statistics, components.
"""
from typing import Union

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import ConfigError

CSI_EPS = 10.0
CSI_CEILING = 2.0

ArrayLike = Union[float, np.ndarray]


def clear_sky_index(ghi: ArrayLike, ghi_cs: ArrayLike, eps: float = CSI_EPS, ceiling: float = CSI_CEILING) -> ArrayLike:
    """
    GHI / GHI_cs, guarded and clamped.

    Returns 0.0 where ghi_cs < eps (night, low sun) and clamps to
    [0, ceiling] so over-irradiance above 1 survives. Missing inputs stay missing.
    """
    ghi = np.asarray(ghi, dtype=float)
    ghi_cs = np.asarray(ghi_cs, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(ghi_cs >= eps, ghi / np.where(ghi_cs >= eps, ghi_cs, 1.0), 0.0)
    ratio = np.clip(ratio, 0.0, ceiling)
    ratio = np.where(np.isnan(ghi) | np.isnan(ghi_cs), np.nan, ratio)
    return float(ratio) if ratio.ndim == 0 else ratio


def clear_sky_deviation(x: np.ndarray, x_cs: np.ndarray) -> np.ndarray:
    """x_cs - x: positive when measured irradiance falls short of clear sky."""
    return np.asarray(x_cs, dtype=float) - np.asarray(x, dtype=float)


def lagged(series: np.ndarray, k: int) -> np.ndarray:
    """output[i] = input[i - k]; the first k entries are missing."""
    if k < 1:
        raise ConfigError(f"lag k must be >= 1, got {k}")
    series = np.asarray(series, dtype=float)
    out = np.full_like(series, np.nan)
    if k < len(series):
        out[k:] = series[:-k]
    return out


def rolling_stat(series: np.ndarray, w: int, kind: str = "mean") -> np.ndarray:
    """
    Trailing-window statistic over [i - w + 1, i].

    Incomplete windows and windows containing a missing value are missing.
    `std` is the population form.
    """
    if w < 2:
        raise ConfigError(f"rolling window w must be >= 2, got {w}")
    series = np.asarray(series, dtype=float)
    out = np.full_like(series, np.nan)
    if len(series) < w:
        return out
    view = sliding_window_view(series, w)
    if kind == "mean":
        values = view.mean(axis=1)
    elif kind == "median":
        values = np.median(view, axis=1)
    elif kind == "std":
        values = view.std(axis=1)
    else:
        raise ConfigError(f"Unknown rolling statistic '{kind}'")
    values[np.isnan(view).any(axis=1)] = np.nan
    out[w - 1:] = values
    return out


def wind_components(speed: np.ndarray, direction_deg: np.ndarray):
    """(north-south, east-west) = speed * (cos, sin) of the direction from North."""
    rad = np.radians(np.asarray(direction_deg, dtype=float))
    speed = np.asarray(speed, dtype=float)
    return speed * np.cos(rad), speed * np.sin(rad)


def sun_position_components(zenith_deg: np.ndarray, azimuth_deg: np.ndarray):
    """Horizontal projection of the sun vector: (cos(az) cos(el), sin(az) cos(el))."""
    elevation = np.radians(90.0 - np.asarray(zenith_deg, dtype=float))
    azimuth = np.radians(np.asarray(azimuth_deg, dtype=float))
    return np.cos(azimuth) * np.cos(elevation), np.sin(azimuth) * np.cos(elevation)


def cos_zenith(zenith_deg: np.ndarray) -> np.ndarray:
    return np.cos(np.radians(np.asarray(zenith_deg, dtype=float)))


def cosine_normal_irradiance(dni: np.ndarray, zenith_deg: np.ndarray) -> np.ndarray:
    """DNI projected on the horizontal, floored at zero below the horizon."""
    return np.asarray(dni, dtype=float) * np.clip(cos_zenith(zenith_deg), 0.0, None)
