import json
import os

import numpy as np
import pandas as pd
import pytest

from skycast.config import PACKAGE_DATA, load_config
from skycast.experiments import (
    dataset_windows,
    evaluate_windows,
    fill_counts,
    forecast_arrays,
    make_splits,
    noise_ablation,
    permutation_importance,
    prepare_dataset,
    select_step,
    split_windows,
    sweep_representations,
    sweep_sequence_length,
    train_model,
)
from skycast.experiments.pipeline import load_table
from skycast.experiments.reference import (
    EIGHT_FEATURE_MAE,
    FINAL_MAE,
    HEADLINE_MAE,
    HORIZONS_MIN,
    NMAP,
    NOISE_ABLATION,
    NREL_SPLITS,
    POC_MAE,
    RMSE,
    TOP10_IMPORTANCE,
    WINDOW_COUNTS,
)
from skycast.evaluation import forecast_skill, mae, per_horizon_table
from skycast.features import load_manifest
from skycast.forecast import poc_windows
from skycast.geometry.solar import augment, solar_frame, sun_events
from skycast.ingest.gaps import detect_gaps
from skycast.ingest.windows import build_windows
from skycast.schema.synth import SynthConfig
from skycast.synth import COVER_COLUMN, distractor_columns, generate

from conftest import NREL_CSV, param_digest

DISTRACTOR = "snow_depth"
DESK_OVERRIDES = [
    "training.fast_epochs=10",
    "network.conv_filters=16",
    "network.lstm_hidden=16",
    "network.dense_hidden=32",
    "network.noise_width=8",
]
SEEDS = range(5)


def _median(results, axis_key, axis_value):
    return float(np.median([r.val_mae for r in results if r.params.get(axis_key) == axis_value]))


# --- fast oracles -------------------------------------------------------------

def test_solstice_daylight_at_golden(golden):
    ev = sun_events("2022-06-21", golden)
    assert ev.daylight_hours == pytest.approx(14.9, abs=0.25)


def test_sun_events_are_ordered_across_the_record(golden):
    for date in pd.date_range("2017-01-01", "2022-12-31", freq="13D"):
        ev = sun_events(date, golden)
        assert ev.sunrise < ev.solar_noon < ev.sunset


def test_clear_sky_rises_until_noon(golden):
    for date in ("2021-01-15", "2021-04-15", "2021-07-15", "2021-10-15"):
        ev = sun_events(date, golden)
        times = pd.date_range(ev.sunrise.ceil("min"), ev.solar_noon.floor("min"), freq="1min")
        ghi_cs = solar_frame(times, golden)["ghi_cs"].to_numpy()
        assert np.all(np.diff(ghi_cs) >= -1e-9)


def test_window_count_matches_scan(golden):
    table, _ = generate(SynthConfig(n_days=10, seed=11))
    table = augment(table, golden)
    ws = build_windows(table, detect_gaps(table, ["ghi"]), T=1, feature_names=["ghi"])

    ghi_cs = table.column("ghi_cs")
    ahead = [10 * h for h in range(1, 13)]
    expected = 0
    for i in range(len(table) - ahead[-1]):
        if ghi_cs[i] > 10.0 and all(ghi_cs[i + a] > 10.0 for a in ahead):
            expected += 1
    assert len(ws) == expected > 0


def test_first_window_waits_for_the_lookback(golden):
    table, _ = generate(SynthConfig(n_days=1, seed=2))
    table = augment(table, golden)
    ws = build_windows(table, detect_gaps(table, ["ghi"]), T=13, spacing_s=600,
                       daylight_min_ghi_cs=None, feature_names=["ghi"])
    assert ws.t0s[0] - table.timestamps[0] == pd.Timedelta(minutes=120)


def test_shipped_top10_manifests_follow_the_reference_ranking():
    top10 = [s.name for s in load_manifest("top10")]
    assert set(top10) == set(TOP10_IMPORTANCE)
    assert list(TOP10_IMPORTANCE) == sorted(TOP10_IMPORTANCE, key=TOP10_IMPORTANCE.get, reverse=True)
    parsimonious = [s.name for s in load_manifest("top10_no_photometers")]
    assert len(parsimonious) == 8
    assert set(parsimonious) == {n for n in top10 if not n.startswith("photometer")}
    assert NOISE_ABLATION[("on", "top10")][2] == HEADLINE_MAE
    assert NOISE_ABLATION[("off", "all")][2] == FINAL_MAE
    assert len(RMSE["model"]) == len(NMAP["poc"]) == len(HORIZONS_MIN) == 12


# --- desk-scale synthetic comparisons ------------------------------------------

@pytest.fixture(scope="module")
def desk_month():
    return generate(SynthConfig(n_days=30, seed=0))[0]


@pytest.mark.slow
def test_delta_csi_beats_raw_ghi(desk_month):
    results = []
    for seed in SEEDS:
        config = load_config(None, DESK_OVERRIDES + [f"seed={seed}", "fast=true"])
        results += sweep_representations(desk_month, config, cells=[["tod_toy", "GHI"], ["tod_toy", "DELTA_CSI"]])
    assert all(r.ok for r in results)
    assert _median(results, "target_representation", "DELTA_CSI") <= _median(results, "target_representation", "GHI")


@pytest.mark.slow
def test_sweep_is_bit_reproducible(desk_month):
    config = load_config(None, DESK_OVERRIDES + ["fast=true"])
    cells = [["tm", "CSI"]]
    first = sweep_representations(desk_month, config, cells=cells)
    second = sweep_representations(desk_month, config, cells=cells)
    assert first[0].val_mae == second[0].val_mae
    assert first[0].config_hash == second[0].config_hash


@pytest.mark.slow
def test_sequence_lengths_all_finite(desk_month):
    config = load_config(None, DESK_OVERRIDES + ["fast=true"])
    results = sweep_sequence_length(desk_month, config, lengths=[1, 4, 7, 13])
    assert len(results) == 4
    assert all(np.isfinite(r.val_mae) for r in results)


@pytest.mark.slow
def test_delta_csi_cell_has_positive_skill(desk_month):
    config = load_config(None, DESK_OVERRIDES + ["fast=true"])
    assert config.target_representation.value == "DELTA_CSI"
    dataset = prepare_dataset(desk_month, config)
    stamps = desk_month.timestamps
    step = select_step(make_splits(config.splits, (stamps[0], stamps[-1])), 0)
    skills = []
    for seed in SEEDS:
        model = train_model(dataset, config, step, seed=seed)
        arrays = model.validate.arrays()
        pred = forecast_arrays(model.net, arrays, config)
        skills.append(forecast_skill(mae(arrays.target_ghi, pred), mae(arrays.target_ghi, poc_windows(arrays))))
    assert np.all(np.isfinite(skills))
    assert np.median(skills) > 0.1


@pytest.mark.slow
def test_planted_cover_ranks_first(desk_month):
    config = load_config(None, DESK_OVERRIDES + ["fast=true"])
    dataset = prepare_dataset(desk_month, config)
    stamps = desk_month.timestamps
    step = select_step(make_splits(config.splits, (stamps[0], stamps[-1])), 0)
    assert DISTRACTOR in distractor_columns()
    firsts = quiet = 0
    for seed in SEEDS:
        model = train_model(dataset, config, step, seed=seed)
        before = param_digest(model.net)
        report = permutation_importance(model.net, model.validate.arrays(), config, repetitions=3, seed=seed)
        assert param_digest(model.net) == before
        firsts += report.ranked()[0].feature == COVER_COLUMN
        noise = next(e for e in report.entries if e.feature == DISTRACTOR)
        quiet += abs(noise.delta_mean) <= 3.0 * noise.delta_std + 0.02 * report.delta(COVER_COLUMN)
    assert firsts >= 4
    assert quiet >= 4


@pytest.mark.slow
def test_noise_channel_helps_with_unmeasured_disturbance(desk_month):
    config = load_config(None, DESK_OVERRIDES + ["fast=true"])
    results = noise_ablation(desk_month, config, feature_sets={"desk": "desk"}, steps=[0], seeds=list(SEEDS))
    assert all(r.ok for r in results)
    assert _median(results, "noise", "on") <= _median(results, "noise", "off")


# --- NREL SRRL full data ---------------------------------------------------------

@pytest.fixture(scope="module")
def nrel():
    config = load_config(os.path.join(PACKAGE_DATA, "experiment_nrel.json"), [f"data.path={json.dumps(NREL_CSV)}"])
    table = load_table(config)
    dataset = prepare_dataset(table, config)
    return config, table, dataset_windows(dataset, config)


@pytest.mark.fulldata
def test_nrel_window_counts(nrel):
    config, table, ws = nrel
    stamps = table.timestamps
    plan = fill_counts(make_splits(config.splits, (stamps[0], stamps[-1])), ws)
    assert [s.name for s in plan] == [s["name"] for s in NREL_SPLITS]
    for step in plan:
        expected = WINDOW_COUNTS[step.name]
        assert step.train_count == pytest.approx(expected["train"], rel=0.02)
        assert step.validate_count == pytest.approx(expected["validate"], rel=0.02)


@pytest.mark.fulldata
def test_nrel_persistence_baseline(nrel):
    config, table, ws = nrel
    stamps = table.timestamps
    step = select_step(make_splits(config.splits, (stamps[0], stamps[-1])), -1)
    _, valid = split_windows(ws, step)
    records = evaluate_windows(None, valid, config)
    assert mae(records["ghi_true"], records["ghi_poc"]) == pytest.approx(POC_MAE, rel=0.05)


def _nrel_config(*overrides):
    path = os.path.join(PACKAGE_DATA, "experiment_nrel.json")
    return load_config(path, [f"data.path={json.dumps(NREL_CSV)}", *overrides])


def _last_step(config, table):
    stamps = table.timestamps
    return select_step(make_splits(config.splits, (stamps[0], stamps[-1])), -1)


@pytest.mark.fulldata
def test_nrel_persistence_per_horizon(nrel):
    config, table, ws = nrel
    _, valid = split_windows(ws, _last_step(config, table))
    scores = per_horizon_table(evaluate_windows(None, valid, config)).iloc[:-1]
    assert [int(h) for h in scores["horizon_min"]] == list(HORIZONS_MIN)
    np.testing.assert_allclose(scores["poc_rmse"].to_numpy(float), RMSE["poc"], rtol=0.15)
    np.testing.assert_allclose(scores["poc_nmap"].to_numpy(float), NMAP["poc"], rtol=0.15)


@pytest.mark.fulldata
def test_nrel_top10_model_at_one_hour(nrel):
    _, table, _ = nrel
    config = _nrel_config(f"features.manifest={json.dumps('top10')}")
    model = train_model(prepare_dataset(table, config), config, _last_step(config, table))
    scores = per_horizon_table(evaluate_windows(model.net, model.validate, config))
    hour = scores[scores["horizon_min"] == 60].iloc[0]
    i = HORIZONS_MIN.index(60)
    assert hour["nmap"] == pytest.approx(NMAP["model"][i], rel=0.15)
    assert hour["poc_nmap"] == pytest.approx(NMAP["poc"][i], rel=0.15)
    assert hour["rmse"] == pytest.approx(RMSE["model"][i], rel=0.15)
    assert scores.iloc[-1]["mae"] == pytest.approx(HEADLINE_MAE, rel=0.15)


@pytest.mark.fulldata
def test_nrel_noise_ablation_final_step(nrel):
    config, table, _ = nrel
    sets = {"top10": "top10", "top10_no_photometers": "top10_no_photometers"}
    results = noise_ablation(table, config, feature_sets=sets, steps=[2], seeds=[0])
    assert all(r.ok for r in results)
    cells = {(r.params["noise"], r.params["feature_set"]): r.val_mae for r in results}
    assert cells[("on", "top10")] == pytest.approx(NOISE_ABLATION[("on", "top10")][2], rel=0.15)
    assert cells[("off", "top10")] == pytest.approx(NOISE_ABLATION[("off", "top10")][2], rel=0.15)
    assert cells[("off", "top10_no_photometers")] == pytest.approx(EIGHT_FEATURE_MAE, rel=0.15)


@pytest.mark.fulldata
def test_nrel_importance_recovers_the_top10(nrel):
    config, table, _ = nrel
    model = train_model(prepare_dataset(table, config), config, _last_step(config, table))
    before = param_digest(model.net)
    report = permutation_importance(model.net, model.validate.arrays(), config, repetitions=1, seed=0)
    assert param_digest(model.net) == before
    top = report.top(10)
    assert top[0] == COVER_COLUMN == next(iter(TOP10_IMPORTANCE))
    assert len(set(top) & set(TOP10_IMPORTANCE)) >= 7
    assert report.delta(COVER_COLUMN) == pytest.approx(TOP10_IMPORTANCE[COVER_COLUMN], rel=0.3)
