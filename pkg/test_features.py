import numpy as np
import pandas as pd
import pytest

from skycast.errors import ConfigError, DataError
from skycast.features import (
    assemble,
    clear_sky_index,
    cyclic_encode,
    dependency_order,
    engineer,
    lagged,
    load_manifest,
    rolling_stat,
    time_milestones,
    time_of_day,
    time_of_year,
    time_representation_specs,
    with_time_representation,
)
from skycast.geometry.solar import augment, sun_events
from skycast.schema.features import FeatureSpec
from skycast.schema.series import TimeSeriesTable
from skycast.schema.site import SiteConfig


@pytest.mark.parametrize("stamp, expected", [
    ("2021-06-01T00:00:00Z", 0.0),
    ("2021-06-01T12:00:00Z", 0.5),
    ("2021-06-01T18:45:00Z", 0.78125),
])
def test_time_of_day(stamp, expected):
    assert time_of_day(stamp) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("stamp, expected", [
    ("2021-01-01T00:00:00Z", 1 / 365),
    ("2021-12-31T00:00:00Z", 365 / 365),
    ("2021-07-02T12:00:00Z", 183.5 / 365),
])
def test_time_of_year(stamp, expected):
    assert time_of_year(stamp) == pytest.approx(expected, abs=1e-12)


def test_time_features_ignore_cadence(golden):
    minute = pd.date_range("2021-06-01", periods=1440, freq="min", tz="UTC")
    fine = assemble(TimeSeriesTable.from_columns(minute, {}, 60), time_representation_specs("tod_toy"), normalize=False)
    coarse_index = minute[::10]
    coarse = assemble(TimeSeriesTable.from_columns(coarse_index, {}, 600), time_representation_specs("tod_toy"),
                      normalize=False)
    assert np.allclose(fine.rows[::10], coarse.rows, atol=1e-12)


def test_time_milestones(golden):
    ev = sun_events("2021-06-15", golden)
    assert time_milestones(ev.sunrise, ev)[0] == 0.0
    assert time_milestones(ev.solar_noon, ev)[1] == 0.0
    assert time_milestones(ev.sunrise + pd.Timedelta(hours=6), ev)[0] == pytest.approx(0.25)
    before_rise = time_milestones(ev.sunrise - pd.Timedelta(hours=1), ev)
    assert all(v < 0 for v in before_rise)


def test_time_milestones_polar_day_rejected():
    site = SiteConfig(latitude=78.2, longitude=15.6)
    ev = sun_events("2021-06-21", site)
    with pytest.raises(DataError):
        time_milestones(ev.solar_noon, ev)


def test_cyclic_encode(rng):
    s, c = cyclic_encode(0.0, 1.0)
    assert (s, c) == pytest.approx((0.0, 1.0))
    s, c = cyclic_encode(6.0, 24.0)
    assert (s, c) == pytest.approx((1.0, 0.0), abs=1e-12)
    x = rng.uniform(-50, 50, 100)
    s, c = cyclic_encode(x, 7.3)
    assert np.allclose(s ** 2 + c ** 2, 1.0)


def test_cyclic_encode_literal_form():
    assert cyclic_encode(0.5, 1.0, literal=True)[0] == pytest.approx(np.sin(0.5))


@pytest.mark.parametrize("ghi, ghi_cs, expected", [
    (500.0, 1000.0, 0.5),
    (100.0, 5.0, 0.0),
    (1200.0, 1000.0, 1.2),
    (5000.0, 1000.0, 2.0),
])
def test_clear_sky_index(ghi, ghi_cs, expected):
    assert clear_sky_index(ghi, ghi_cs, eps=10.0) == pytest.approx(expected)


def test_clear_sky_index_of_clear_sky_is_one(golden):
    table = augment(TimeSeriesTable.regular("2021-06-01", 1440, 60, {}), golden)
    cs = table.column("ghi_cs")
    csi = clear_sky_index(cs, cs)
    on = cs >= 10.0
    assert np.allclose(csi[on], 1.0, atol=1e-9)
    assert np.all(csi[~on] == 0.0)


def test_lagged():
    out = lagged(np.array([1.0, 2.0, 3.0]), 1)
    assert np.isnan(out[0]) and list(out[1:]) == [1.0, 2.0]
    with pytest.raises(ConfigError):
        lagged(np.ones(3), 0)


def test_lag_matches_index_arithmetic(rng):
    dni = rng.normal(size=200)
    out = lagged(dni, 4)
    for i in range(4, 200):
        assert out[i] == dni[i - 4]
    assert np.array_equal(np.roll(out, -4)[:-4], dni[:-4])


def test_rolling_mean():
    out = rolling_stat(np.array([1.0, 3.0, 5.0]), 2, "mean")
    assert np.isnan(out[0]) and list(out[1:]) == [2.0, 4.0]


def test_rolling_median_of_constant():
    out = rolling_stat(np.full(20, 7.5), 11, "median")
    assert np.all(out[10:] == 7.5) and np.isnan(out[:10]).all()


def test_rolling_std_matches_two_pass(rng):
    x = rng.normal(100.0, 20.0, 300)
    out = rolling_stat(x, 10, "std")
    for i in range(9, 300):
        window = x[i - 9:i + 1]
        mean = sum(window) / 10
        expected = (sum((v - mean) ** 2 for v in window) / 10) ** 0.5
        assert out[i] == pytest.approx(expected, rel=1e-12)


def test_rolling_window_too_short():
    with pytest.raises(ConfigError):
        rolling_stat(np.ones(5), 1)
    with pytest.raises(ConfigError):
        FeatureSpec("bad", ["ghi"], "roll_mean", {"w": 1})


def test_assemble_empty_specs():
    table = TimeSeriesTable.regular("2021-06-01", 12, 60, {"ghi": np.ones(12)})
    matrix = assemble(table, [])
    assert matrix.shape == (12, 0)


def test_assemble_zscore_and_exclusion(rng):
    ghi = rng.uniform(0, 900, 500)
    table = TimeSeriesTable.regular("2021-06-01", 500, 60, {"ghi": ghi})
    specs = [FeatureSpec("ghi"), FeatureSpec("ghi_lag_3", ["ghi"], "lag", {"k": 3})]
    matrix = assemble(table, specs)
    assert matrix.feature_names == ["ghi", "ghi_lag_3"]
    assert matrix.excluded_rows == 3
    assert np.allclose(matrix.rows.mean(axis=0), 0.0, atol=1e-9)
    assert np.allclose(matrix.rows.std(axis=0), 1.0, atol=1e-9)


def test_frozen_normalization_is_reused(rng):
    specs = [FeatureSpec("ghi")]
    train = assemble(TimeSeriesTable.regular("2021-06-01", 100, 60, {"ghi": rng.uniform(0, 900, 100)}), specs)
    later = TimeSeriesTable.regular("2021-06-02", 50, 60, {"ghi": rng.uniform(0, 900, 50)})
    matrix = assemble(later, specs, normalization=train.normalization)
    expected = (later.column("ghi") - train.normalization.mean[0]) / train.normalization.scale[0]
    assert np.allclose(matrix.rows[:, 0], expected)


def test_assembly_is_permutation_stable(rng):
    ghi = rng.uniform(0, 900, 60)
    index = pd.date_range("2021-06-01", periods=60, freq="min", tz="UTC")
    order = rng.permutation(60)
    frame = pd.DataFrame({"ghi": ghi[order]}, index=index[order]).sort_index()
    shuffled = TimeSeriesTable(frame, 60)
    ordered = TimeSeriesTable.from_columns(index, {"ghi": ghi}, 60)
    with pytest.raises(DataError):
        TimeSeriesTable.from_columns(index[order], {"ghi": ghi[order]}, 60)
    specs = [FeatureSpec("ghi"), FeatureSpec("ghi_roll", ["ghi"], "roll_mean", {"w": 3})]
    assert np.array_equal(assemble(shuffled, specs).rows, assemble(ordered, specs).rows)


def test_shipped_manifest_counts():
    assert len(load_manifest("srrl_full")) == 129
    assert len(load_manifest("desk")) == 15
    assert len(load_manifest("top10")) == 10


def test_desk_manifest_assembles_on_synthetic_table(small_synth, golden):
    table, _ = small_synth
    specs = load_manifest("desk")
    matrix = assemble(augment(table, golden), specs, site=golden)
    assert matrix.shape[1] == 15
    assert matrix.excluded_rows == 10


def test_dependency_cycle_rejected():
    specs = [
        FeatureSpec("a", ["b"], "lag", {"k": 1}),
        FeatureSpec("b", ["a"], "lag", {"k": 1}),
    ]
    with pytest.raises(ConfigError, match="Cyclic"):
        dependency_order(specs)


def test_dependencies_computed_first():
    table = TimeSeriesTable.regular("2021-06-01", 30, 60, {"ghi": np.arange(30.0)})
    specs = [
        FeatureSpec("lag_of_mean", ["ghi_mean"], "lag", {"k": 1}),
        FeatureSpec("ghi_mean", ["ghi"], "roll_mean", {"w": 2}),
    ]
    out = engineer(table, specs)
    assert out.column("lag_of_mean")[2] == pytest.approx(0.5)


def test_time_representation_swap():
    specs = load_manifest("desk")
    swapped = with_time_representation(specs, "trig_tm")
    names = [s.name for s in swapped]
    assert "tod" not in names and "sin_time_from_sunrise" in names
    assert len(swapped) == len(specs) - 2 + 6
    with pytest.raises(ConfigError):
        time_representation_specs("lunar")
