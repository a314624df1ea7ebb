import json
import math
import os

import numpy as np
import pandas as pd
import pytest

from skycast.config import PACKAGE_DATA, SplitConfig, load_config
from skycast.errors import ConfigError, DataError
from skycast.experiments import (
    CellJob,
    ablation_table,
    dataset_windows,
    derive_seed,
    evaluate_windows,
    fill_counts,
    importance_histogram,
    in_range,
    make_splits,
    noise_ablation,
    permutation_importance,
    prepare_dataset,
    representation_autocorrelation,
    representation_grid,
    run_cells,
    select_step,
    split_windows,
    sweep_representations,
    sweep_sequence_length,
    train_cell,
    train_model,
)
from skycast.experiments.sweeps import representation_cells
from skycast.network import forward, init_network
from skycast.schema.series import WindowArrays

from conftest import param_digest

SPAN = (pd.Timestamp("2021-06-01T00:00:00Z"), pd.Timestamp("2021-06-06T23:59:00Z"))


def _plan(config, table):
    stamps = table.timestamps
    return make_splits(config.splits, (stamps[0], stamps[-1]))


def test_rolling_splits_are_disjoint_and_chained():
    plan = make_splits(SplitConfig(initial_train_days=3, validate_days=1, n_steps=2), SPAN)
    assert len(plan) == 2
    for step in plan:
        assert step.train_range[1] == step.validate_range[0]
        assert step.train_range[0] == SPAN[0]
    assert plan[0].validate_range[1] == plan[1].validate_range[0]
    assert plan[1].validate_range[1] == pd.Timestamp("2021-06-06", tz="UTC")


def test_short_span_names_the_shortfall():
    with pytest.raises(DataError, match="3 days short"):
        make_splits(SplitConfig(initial_train_days=5, validate_days=2, n_steps=2), SPAN)


def test_explicit_nrel_splits_are_inclusive():
    config = load_config(os.path.join(PACKAGE_DATA, "experiment_nrel.json"))
    plan = make_splits(config.splits, ("2017-09-27T00:00:00Z", "2022-09-26T23:59:00Z"))
    assert [s.name for s in plan] == ["step1", "step2", "step3"]
    assert plan[0].train_range == (pd.Timestamp("2017-09-27", tz="UTC"), pd.Timestamp("2019-09-27", tz="UTC"))
    assert plan[2].validate_range[1] == pd.Timestamp("2022-09-27", tz="UTC")
    with pytest.raises(DataError):
        make_splits(config.splits, ("2017-09-27", "2022-06-30"))


def test_malformed_explicit_split():
    splits = SplitConfig(steps=[{"train": ["2021-06-01", "2021-06-03"], "validate": ["2021-06-05", "2021-06-06"]}])
    with pytest.raises(ConfigError):
        make_splits(splits, SPAN)


def test_select_step():
    plan = make_splits(SplitConfig(initial_train_days=3, validate_days=1, n_steps=2), SPAN)
    assert select_step(plan, -1).name == "step2"
    with pytest.raises(ConfigError):
        select_step(plan, 5)


def test_split_counts_match_scan(small_synth, fast_config):
    table, _ = small_synth
    dataset = prepare_dataset(table, fast_config)
    ws = dataset_windows(dataset, fast_config)
    plan = fill_counts(_plan(fast_config, table), ws)
    span_after = pd.Timedelta(seconds=max(ws.horizon_offsets))
    for step in plan:
        lo, hi = step.validate_range
        expected = sum(1 for t0 in ws.t0s if t0 >= lo and t0 + span_after < hi)
        assert step.validate_count == expected
        assert step.train_count > step.validate_count > 0
        train, valid = split_windows(ws, step)
        assert len(set(train.t0s) & set(valid.t0s)) == 0


def test_derive_seed():
    assert derive_seed(0, "representation", "tm|CSI") == derive_seed(0, "representation", "tm|CSI")
    assert derive_seed(0, "a") != derive_seed(1, "a")
    assert 0 <= derive_seed(7, "x", 3) < 2 ** 32


def test_representation_cells(fast_config):
    assert len(representation_cells(fast_config)) == 20
    custom = fast_config.with_overrides(['sweeps.cells=[["tm", "GHI"]]'])
    assert representation_cells(custom) == [["tm", "GHI"]]


def test_pipeline_trains_and_scores(small_synth, fast_config, tmp_path):
    table, _ = small_synth
    dataset = prepare_dataset(table, fast_config)
    assert dataset.feature_names[:2] == ["tod", "toy"]
    step = select_step(_plan(fast_config, table), 0)
    log = tmp_path / "epochs.csv"
    model = train_model(dataset, fast_config, step, log_path=str(log))
    assert log.exists()
    assert model.history.epochs_run == 2
    assert model.net.representation == "DELTA_CSI"

    records = evaluate_windows(model.net, model.validate, fast_config)
    assert len(records) == 12 * len(model.validate)
    assert (records["ghi_pred"] >= 0).all()
    assert np.isfinite(records["ghi_pred"]).all()


def test_baseline_mode_uses_poc(small_synth, fast_config):
    table, _ = small_synth
    dataset = prepare_dataset(table, fast_config)
    records = evaluate_windows(None, dataset_windows(dataset, fast_config), fast_config)
    assert np.array_equal(records["ghi_pred"], records["ghi_poc"])


def test_failed_cell_is_recorded_not_raised(small_synth, fast_config):
    table, _ = small_synth
    config = fast_config.with_overrides(["splits.initial_train_days=60"])
    result = train_cell(CellJob("representation", "broken", config, seed=1), table)
    assert result.status == "failed"
    assert "DataError" in result.error
    assert math.isnan(result.val_mae)


def test_sequence_length_bounds(small_synth, fast_config):
    with pytest.raises(ConfigError):
        sweep_sequence_length(small_synth[0], fast_config, lengths=[0, 4])
    with pytest.raises(ConfigError):
        sweep_sequence_length(small_synth[0], fast_config, lengths=[14])


def test_representation_sweep_resumes_from_cell_files(small_synth, fast_config, tmp_path):
    table, _ = small_synth
    cells = [["tod_toy", "GHI"], ["tod_toy", "DELTA_CSI"]]
    first = sweep_representations(table, fast_config, cells=cells, out_dir=str(tmp_path))
    assert all(r.ok for r in first)
    assert first[0].seed != first[1].seed
    assert len(first[0].per_horizon_fss) == 12

    stored = sorted((tmp_path / "cells").iterdir())
    assert len(stored) == 2
    for path in stored:
        data = json.loads(path.read_text())
        data["val_mae"] = -1.0
        path.write_text(json.dumps(data))

    again = sweep_representations(table, fast_config, cells=cells, out_dir=str(tmp_path))
    assert [r.val_mae for r in again] == [-1.0, -1.0]
    grid = representation_grid(again)
    assert list(grid.columns) == ["DELTA_CSI", "GHI"]


def test_sequence_sweep_scores_on_shared_windows(small_synth, fast_config):
    table, _ = small_synth
    results = sweep_sequence_length(table, fast_config, lengths=[1, 3])
    assert [r.label for r in results] == ["1", "3"]
    assert all(r.ok for r in results)
    assert results[0].poc_mae == pytest.approx(results[1].poc_mae)


def test_noise_ablation_pairs_seeds(small_synth, fast_config):
    table, _ = small_synth
    results = noise_ablation(table, fast_config, feature_sets={"desk": "desk"}, steps=[0], seeds=[0])
    on, off = results
    assert on.params["noise"] == "on" and off.params["noise"] == "off"
    assert on.seed == off.seed
    assert on.params["noise_width"] == 4 and off.params["noise_width"] == 0
    table_ = ablation_table(results)
    assert table_.shape == (2, 1)


def test_disabled_noise_matches_plain_network(rng):
    config = load_config(None, ["network.noise_width=3", "network.dropout_rate=0.0"]).network_config(4, 3)
    noisy = init_network(config, seed=2)
    plain = init_network(config.replace(noise_width=0), seed=5)
    plain.set_params({n: p for n, p in noisy.params.items() if n != "conv_noise_w"})
    x = rng.normal(size=(5, 3, 4))
    assert np.allclose(forward(noisy, x, None)[0], forward(plain, x, None)[0])
    assert noisy.parameter_count - plain.parameter_count == 3 * 3 * config.conv_filters


def test_permutation_importance(small_synth, fast_config):
    table, _ = small_synth
    dataset = prepare_dataset(table, fast_config)
    step = select_step(_plan(fast_config, table), 0)
    model = train_model(dataset, fast_config, step)
    arrays = model.validate.arrays()

    before = param_digest(model.net)
    inputs_before = arrays.inputs.copy()
    report = permutation_importance(model.net, arrays, fast_config, repetitions=2, seed=3)
    assert param_digest(model.net) == before
    assert np.array_equal(arrays.inputs, inputs_before)
    assert len(report.entries) == len(dataset.feature_names)
    assert all(len(e.deltas) == 2 for e in report.entries)
    assert report.ranked()[0].delta_mean >= report.ranked()[-1].delta_mean
    assert importance_histogram(report, bins=5)["count"].sum() == len(report.entries)

    j = model.net.feature_names.index("snow_depth")
    inputs = arrays.inputs.copy()
    inputs[:, :, j] = 1.5
    flat = WindowArrays(arrays.t0, inputs, arrays.target_ghi, arrays.ghi_0, arrays.csi_0,
                        arrays.ghi_cs, arrays.cloud_cover)
    constant = permutation_importance(model.net, flat, fast_config, features=["snow_depth"], repetitions=3)
    assert constant.delta("snow_depth") == 0.0

    with pytest.raises(ConfigError):
        permutation_importance(model.net, arrays, fast_config, features=["not_a_feature"])


def test_representation_autocorrelation(small_synth, fast_config):
    frame = representation_autocorrelation(small_synth[0], fast_config, lags=range(-3, 4))
    assert list(frame.columns) == ["GHI", "CSI", "CS_DEV"]
    assert np.allclose(frame.loc[0], 1.0)
    assert np.allclose(frame.loc[2], frame.loc[-2])


def test_run_cells_keeps_job_order(small_synth, fast_config):
    table, _ = small_synth
    broken = fast_config.with_overrides(["splits.initial_train_days=60"])
    jobs = [CellJob("x", "b", broken, 1), CellJob("x", "a", broken, 2)]
    results = run_cells(jobs, table)
    assert [r.label for r in results] == ["b", "a"]
    assert not any(r.ok for r in results)
