import json
import math
import os

import numpy as np
import pandas as pd
import pytest
from openpyxl import load_workbook

from skycast.errors import ConfigError, DataError
from skycast.evaluation import (
    autocorrelation_profile,
    classify,
    day_overlays,
    density_grid,
    forecast_skill,
    mae,
    nmap,
    per_horizon_table,
    records_from,
    report,
    rmse,
    spearman,
    stratify,
    to_records,
    write_report,
)

HORIZONS = [10 * k for k in range(1, 13)]


def _records(rng, n=40, cover=None, pred_noise=30.0, poc_noise=60.0):
    t0 = pd.date_range("2021-06-01T16:00:00Z", periods=n, freq="10min")
    truth = rng.uniform(100.0, 900.0, (n, 12))
    pred = np.clip(truth + rng.normal(0.0, pred_noise, (n, 12)), 0.0, None)
    poc = np.clip(truth + rng.normal(0.0, poc_noise, (n, 12)), 0.0, None)
    return records_from(t0, truth, pred, poc, HORIZONS, cover)


def test_mae_examples(rng):
    assert mae([100.0, 200.0], [110.0, 190.0]) == 10.0
    x = rng.uniform(0, 1000, 1000)
    y = rng.uniform(0, 1000, 1000)
    total = 0.0
    for a, b in zip(x, y):
        total += abs(a - b)
    assert mae(x, y) == pytest.approx(total / 1000, rel=1e-12)
    with pytest.raises(DataError):
        mae([], [])


def test_rmse_examples(rng):
    assert rmse([0.0, 0.0], [3.0, 4.0]) == pytest.approx(math.sqrt(12.5))
    for _ in range(20):
        x, y = rng.normal(size=30), rng.normal(size=30)
        assert rmse(x, y) >= mae(x, y)


def test_nmap_examples():
    assert nmap([100.0, 100.0], [90.0, 110.0]) == pytest.approx(10.0)
    assert nmap([5.0, 7.0], [5.0, 7.0]) == 0.0
    with pytest.raises(DataError):
        nmap([0.0, 0.0], [1.0, 1.0])


def test_forecast_skill():
    assert forecast_skill(74.34, 134.35) == pytest.approx(0.4467, abs=1e-4)
    assert forecast_skill(50.0, 50.0) == 0.0
    assert forecast_skill(0.0, 10.0) == 1.0
    with pytest.raises(DataError):
        forecast_skill(1.0, 0.0)


def test_spearman_rank_invariance(rng):
    x = rng.normal(size=200)
    y = x + rng.normal(scale=0.5, size=200)
    assert spearman(x, np.exp(x)) == pytest.approx(1.0)
    assert spearman(x, y) == pytest.approx(spearman(np.exp(x), y ** 3), abs=1e-12)
    assert math.isnan(spearman(np.ones(5), np.arange(5.0)))


def test_spearman_matches_textbook_formula(rng):
    x, y = rng.permutation(50).astype(float), rng.permutation(50).astype(float)
    d = x - y
    expected = 1.0 - 6.0 * np.sum(d ** 2) / (50 * (50 ** 2 - 1))
    assert spearman(x, y) == pytest.approx(expected, abs=1e-12)


def test_autocorrelation_profile_is_symmetric(rng):
    series = np.cumsum(rng.normal(size=300))
    profile = autocorrelation_profile(series, range(-3, 4))
    assert profile[0] == pytest.approx(1.0)
    assert profile[2] == profile[-2]
    with pytest.raises(DataError):
        autocorrelation_profile(np.arange(5.0), [5])


def test_poc_as_model_has_zero_skill(rng):
    frame = _records(rng)
    frame["ghi_pred"] = frame["ghi_poc"]
    table = per_horizon_table(frame)
    assert np.allclose(table["fss"].astype(float), 0.0)


def test_per_horizon_table_layout(rng):
    frame = _records(rng)
    table = per_horizon_table(frame)
    assert len(table) == 13
    assert list(table["horizon_min"][:12]) == HORIZONS and table["horizon_min"].iloc[-1] == "all"
    weighted = np.average(table["mae"][:12], weights=table["count"][:12])
    assert table["mae"].iloc[-1] == pytest.approx(weighted)
    assert (table["fss"].astype(float) <= 1.0).all()


def test_report_aggregates_and_clamps(rng):
    result = report(_records(rng), clamped=7)
    assert result.record_count == 40 * 12
    assert result.clamped == 7
    assert result.horizon(60)["count"] == 40
    assert result.aggregate["mae"] < result.aggregate["poc_mae"]
    assert result.aggregate["fss"] > 0
    with pytest.raises(DataError):
        report(_records(rng).iloc[0:0])


def test_classify_thresholds():
    labels = classify([0.0, 19.9, 20.0, 79.9, 80.0, 100.0, np.nan])
    assert list(labels) == ["Clear", "Clear", "Partially Cloudy", "Partially Cloudy",
                            "Overcast", "Overcast", "Unknown"]
    with pytest.raises(ConfigError):
        classify([1.0], clear_max=90.0, overcast_min=80.0)


def test_strata_fractions_sum_to_one(rng):
    cover = rng.choice([5.0, 50.0, 95.0], size=40)
    strata = stratify(_records(rng, cover=cover))
    assert [s.name for s in strata] == ["Clear", "Partially Cloudy", "Overcast"]
    assert sum(s.fraction for s in strata) == pytest.approx(1.0)
    assert sum(s.count for s in strata) == 40
    populated = [s for s in strata if s.count]
    assert all(s.quantiles["p5"] <= s.quantiles["p50"] <= s.quantiles["p95"] for s in populated)


def test_missing_cover_forms_unknown_stratum(rng):
    strata = stratify(_records(rng))
    assert strata[-1].name == "Unknown" and strata[-1].count == 40


def test_plot_data(rng):
    frame = _records(rng, n=10)
    grid = density_grid(frame, bins=10)
    assert set(grid["source"]) == {"model", "poc"}
    assert set(grid["horizon_min"]) == set(HORIZONS)
    overlays = day_overlays(frame, horizons=[60])
    assert len(overlays) == 10
    assert (overlays["valid_time"] == overlays["valid_time"].sort_values().to_numpy()).all()


def test_records_round_trip_through_dataclass(rng):
    frame = _records(rng, n=3)
    records = to_records(frame)
    assert len(records) == 36
    assert per_horizon_table(records).equals(per_horizon_table(frame))


def test_write_report(tmp_path, rng):
    frame = _records(rng, cover=rng.uniform(0, 100, 40))
    result = report(frame)
    paths = write_report(result, str(tmp_path), records=frame, density_bins=8)
    names = {os.path.basename(p) for p in paths}
    assert names == {"metrics.json", "per_horizon.csv", "strata.csv", "density.csv", "overlays.csv", "report.xlsx"}
    with open(tmp_path / "metrics.json") as f:
        metrics = json.load(f)
    assert metrics["record_count"] == 480 and len(metrics["per_horizon"]) == 12
    wb = load_workbook(tmp_path / "report.xlsx")
    assert wb.sheetnames == ["per_horizon", "strata"]
    assert wb["per_horizon"].max_row == 14
