"""
Skycast Geometry - Solar
Solar position, daily sun events and Ineichen-Perez clear-sky irradiance.

Position uses the closed-form Spencer declination and equation of time
(accurate to a few tenths of a degree, no refraction). Clear sky uses the
Ineichen-Perez model with Kasten-Young airmass and a Linke turbidity per
site or per month.
"""
import datetime as dt
import logging
from typing import Union

import numpy as np
import pandas as pd
from cachetools import LRUCache, cached
from pvlib import atmosphere, clearsky, irradiance, solarposition

from ..schema.series import TimeSeriesTable
from ..schema.site import ClearSkyIrradiance, SiteConfig, SolarPosition, SunEvents

logger = logging.getLogger(__name__)

CLEAR_SKY_COLUMNS = ["ghi_cs", "dni_cs", "dhi_cs", "eclipse_shading", "zenith", "elevation", "azimuth"]

_events_cache = LRUCache(maxsize=8192)


def _utc_index(times) -> pd.DatetimeIndex:
    index = pd.DatetimeIndex(times if not isinstance(times, (pd.Timestamp, dt.datetime, str)) else [times])
    return index.tz_localize("UTC") if index.tz is None else index.tz_convert("UTC")


def _fractional_doy(index: pd.DatetimeIndex) -> np.ndarray:
    seconds = index.hour * 3600 + index.minute * 60 + index.second
    return np.asarray(index.dayofyear + seconds / 86400.0, dtype=float)


def _angles(index: pd.DatetimeIndex, site: SiteConfig):
    """Zenith and azimuth in degrees for UTC instants."""
    doy = _fractional_doy(index)
    declination = solarposition.declination_spencer71(doy)
    eot = solarposition.equation_of_time_spencer71(doy)
    hour_angle = solarposition.hour_angle(index, site.longitude, eot)
    lat = np.radians(site.latitude)
    ha = np.radians(np.asarray(hour_angle, dtype=float))
    zenith = solarposition.solar_zenith_analytical(lat, ha, declination)
    azimuth = solarposition.solar_azimuth_analytical(lat, ha, declination, zenith)
    zenith_deg = np.degrees(np.asarray(zenith, dtype=float))
    azimuth_deg = np.mod(np.degrees(np.nan_to_num(np.asarray(azimuth, dtype=float))), 360.0)
    return zenith_deg, azimuth_deg


def solar_position(t, site: SiteConfig) -> SolarPosition:
    zenith, azimuth = _angles(_utc_index(t), site)
    return SolarPosition(zenith=float(zenith[0]), elevation=90.0 - float(zenith[0]), azimuth=float(azimuth[0]))


def local_solar_date(t, site: SiteConfig) -> dt.date:
    """Calendar date of the solar day containing `t` (UTC shifted by longitude/15 hours)."""
    ts = pd.Timestamp(t)
    ts = ts.tz_localize("UTC") if ts.tzinfo is None else ts.tz_convert("UTC")
    return (ts + pd.Timedelta(hours=site.longitude / 15.0)).date()


@cached(cache=_events_cache)
def _events(ordinal: int, site: SiteConfig) -> SunEvents:
    date = dt.date.fromordinal(ordinal)
    midnight = pd.DatetimeIndex([pd.Timestamp(date, tz="UTC")])
    # Declination at the approximate solar noon of that day
    noon_doy = date.timetuple().tm_yday + (0.5 - site.longitude / 360.0)
    declination = solarposition.declination_spencer71(np.array([noon_doy]))
    eot = solarposition.equation_of_time_spencer71(np.array([noon_doy]))

    product = -np.tan(np.radians(site.latitude)) * np.tan(declination[0])
    transit_hours = (-site.longitude - eot[0] / 4.0) / 15.0 + 12.0
    solar_noon = midnight[0] + pd.to_timedelta(transit_hours, unit="h")
    if product < -1.0:
        return SunEvents(date, None, solar_noon, None, polar="day")
    if product > 1.0:
        return SunEvents(date, None, solar_noon, None, polar="night")

    sunrise, sunset, transit = solarposition.sun_rise_set_transit_geometric(
        midnight, site.latitude, site.longitude, declination, eot
    )
    return SunEvents(date, sunrise[0], transit[0], sunset[0])


def sun_events(date: Union[dt.date, str, pd.Timestamp], site: SiteConfig) -> SunEvents:
    """
    Geometric sunrise, solar noon and sunset of one solar day.

    Polar days and nights come back with `polar` set and no rise/set.
    """
    date = pd.Timestamp(date).date()
    return _events(date.toordinal(), site)


def turbidity_series(index: pd.DatetimeIndex, site: SiteConfig) -> np.ndarray:
    by_month = np.array([site.turbidity_for(m) for m in range(1, 13)])
    return by_month[np.asarray(index.month) - 1]


def _clear_sky(index: pd.DatetimeIndex, zenith: np.ndarray, site: SiteConfig, turbidity=None):
    if turbidity is None:
        turbidity = turbidity_series(index, site)
    up = zenith < 90.0
    rel = atmosphere.get_relative_airmass(np.where(up, zenith, 89.9), model="kastenyoung1989")
    pressure = atmosphere.alt2pres(site.elevation_m)
    am_abs = atmosphere.get_absolute_airmass(rel, pressure)
    dni_extra = np.asarray(irradiance.get_extra_radiation(index), dtype=float)

    out = clearsky.ineichen(np.where(up, zenith, 89.9), am_abs, turbidity,
                            altitude=site.elevation_m, dni_extra=dni_extra)
    ghi = np.nan_to_num(np.asarray(out["ghi"], dtype=float))
    dni = np.clip(np.nan_to_num(np.asarray(out["dni"], dtype=float)), 0.0, None)
    ghi = np.where(up, ghi, 0.0)
    dni = np.where(up, dni, 0.0)
    cos_z = np.where(up, np.cos(np.radians(zenith)), 0.0)
    dhi = np.clip(ghi - cos_z * dni, 0.0, None)
    airmass = np.where(up, np.asarray(rel, dtype=float), 0.0)
    return ghi, dni, dhi, airmass


def clear_sky(t, site: SiteConfig, turbidity: float = None) -> ClearSkyIrradiance:
    """Clear-sky GHI/DNI/DHI at one instant; zero with the sun below the horizon."""
    index = _utc_index(t)
    zenith, _ = _angles(index, site)
    tl = None if turbidity is None else np.array([float(turbidity)])
    ghi, dni, dhi, _ = _clear_sky(index, zenith, site, tl)
    return ClearSkyIrradiance(float(ghi[0]), float(dni[0]), float(dhi[0]))


def solar_frame(times, site: SiteConfig) -> pd.DataFrame:
    """
    Vectorized geometry and clear-sky columns for many instants.

    Args:
        times: UTC instants (naive values are taken as UTC)
        site: measurement site

    Returns:
        DataFrame indexed by time with zenith, elevation, azimuth, airmass,
        ghi_cs, dni_cs, dhi_cs and eclipse_shading
    """
    index = _utc_index(times)
    zenith, azimuth = _angles(index, site)
    ghi, dni, dhi, airmass = _clear_sky(index, zenith, site)
    return pd.DataFrame({
        "zenith": zenith,
        "elevation": 90.0 - zenith,
        "azimuth": azimuth,
        "airmass": airmass,
        "ghi_cs": ghi,
        "dni_cs": dni,
        "dhi_cs": dhi,
        "eclipse_shading": np.full(len(index), float(site.eclipse_shading)),
    }, index=index)


def augment(table: TimeSeriesTable, site: SiteConfig, overwrite: bool = False) -> TimeSeriesTable:
    """
    Adds the clear-sky model columns to a station table.

    Existing columns are kept unless `overwrite` is set.
    """
    frame = solar_frame(table.timestamps, site)
    columns = {name: frame[name].to_numpy() for name in CLEAR_SKY_COLUMNS
               if overwrite or name not in table}
    logger.info(f"☀️ Augmented table with {len(columns)} clear-sky columns for {site.name or (site.latitude, site.longitude)}")
    return table.with_columns(columns)
