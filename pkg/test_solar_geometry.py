import numpy as np
import pandas as pd
import pytest

from skycast.geometry.solar import (
    CLEAR_SKY_COLUMNS,
    augment,
    clear_sky,
    solar_frame,
    solar_position,
    sun_events,
    turbidity_series,
)
from skycast.schema.series import TimeSeriesTable
from skycast.schema.site import SiteConfig
from skycast.errors import ConfigError


def test_elevation_is_complement_of_zenith(golden, rng):
    for offset in rng.uniform(0, 365 * 86400, 20):
        t = pd.Timestamp("2019-01-01", tz="UTC") + pd.Timedelta(seconds=float(offset))
        pos = solar_position(t, golden)
        assert pos.elevation == 90.0 - pos.zenith
        assert 0.0 <= pos.azimuth < 360.0


def test_solstice_noon_zenith(golden):
    ev = sun_events("2022-06-21", golden)
    pos = solar_position(ev.solar_noon, golden)
    assert pos.zenith == pytest.approx(abs(golden.latitude - 23.44), abs=0.5)


def test_local_midnight_sun_below_horizon(golden):
    # Golden CO is UTC-7 in solar time
    pos = solar_position(pd.Timestamp("2021-03-15T07:00:00Z"), golden)
    assert pos.zenith > 90.0
    assert not pos.is_up


def test_sun_events_order(golden):
    ev = sun_events("2021-09-22", golden)
    assert ev.rises
    assert ev.sunrise < ev.solar_noon < ev.sunset
    assert 11.5 < ev.daylight_hours < 12.8


def test_polar_night_has_no_rise():
    site = SiteConfig(latitude=78.2, longitude=15.6)
    ev = sun_events("2021-12-21", site)
    assert ev.polar == "night"
    assert ev.sunrise is None and ev.sunset is None


def test_clear_sky_zero_at_night(golden):
    cs = clear_sky(pd.Timestamp("2021-06-01T08:00:00Z"), golden)
    assert cs.ghi_cs == cs.dni_cs == cs.dhi_cs == 0.0


def test_clear_sky_noon_magnitude_and_closure(golden):
    ev = sun_events("2021-06-21", golden)
    cs = clear_sky(ev.solar_noon, golden)
    zenith = solar_position(ev.solar_noon, golden).zenith
    assert 900.0 < cs.ghi_cs < 1200.0
    assert cs.ghi_cs <= np.cos(np.radians(zenith)) * cs.dni_cs + cs.dhi_cs + 1e-6


def test_higher_turbidity_dims_clear_sky(golden):
    noon = sun_events("2021-06-21", golden).solar_noon
    assert clear_sky(noon, golden, turbidity=6.0).ghi_cs < clear_sky(noon, golden, turbidity=2.0).ghi_cs


def test_monthly_turbidity_requires_twelve_values():
    with pytest.raises(ConfigError):
        SiteConfig.from_dict({"latitude": 39.7, "longitude": -105.2, "turbidity": [3.0] * 11})
    site = SiteConfig.from_dict({"latitude": 39.7, "longitude": -105.2, "turbidity": [2.0] * 6 + [4.0] * 6})
    assert site.turbidity_for(1) == 2.0 and site.turbidity_for(12) == 4.0


def test_clear_sky_uses_the_monthly_turbidity():
    site = SiteConfig.from_dict({"latitude": 39.7, "longitude": -105.2, "turbidity": [2.0] * 6 + [4.0] * 6})
    index = pd.DatetimeIndex(["2021-03-15 19:00", "2021-09-15 18:30"], tz="UTC")
    assert list(turbidity_series(index, site)) == [2.0, 4.0]
    march, september = (pd.Timestamp(t) for t in index)
    assert clear_sky(march, site).ghi_cs == pytest.approx(clear_sky(march, site, turbidity=2.0).ghi_cs, rel=1e-12)
    assert clear_sky(september, site).ghi_cs == pytest.approx(clear_sky(september, site, turbidity=4.0).ghi_cs, rel=1e-12)
    flat = SiteConfig(latitude=39.7, longitude=-105.2, default_turbidity=3.0)
    assert list(turbidity_series(index, flat)) == [3.0, 3.0]


def test_site_ranges_validated():
    with pytest.raises(ConfigError):
        SiteConfig(latitude=91.0, longitude=0.0)
    with pytest.raises(ConfigError):
        SiteConfig(latitude=0.0, longitude=0.0, default_turbidity=0.5)


def test_solar_frame_matches_scalar_calls(golden):
    times = pd.date_range("2021-06-01T12:00:00Z", periods=5, freq="37min")
    frame = solar_frame(times, golden)
    for t in times:
        cs = clear_sky(t, golden)
        assert frame.loc[t, "ghi_cs"] == pytest.approx(cs.ghi_cs, abs=1e-9)
        assert frame.loc[t, "zenith"] == pytest.approx(solar_position(t, golden).zenith, abs=1e-9)


def test_augment_adds_clear_sky_columns(golden):
    table = TimeSeriesTable.regular("2021-06-01", 120, 60, {"ghi": np.ones(120)})
    out = augment(table, golden)
    assert all(c in out for c in CLEAR_SKY_COLUMNS)
    assert np.all(out.column("eclipse_shading") == 1.0)
    assert np.array_equal(out.column("ghi"), table.column("ghi"))
