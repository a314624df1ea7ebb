"""
Skycast Experiments - Sweeps
Representation, sequence-length and noise-ablation grids over a worker pool.

Every cell runs from a fully resolved config and a seed derived from the
master seed and the cell key. Finished cells are written to
<out>/cells/<key>.json, so an interrupted sweep resumes where it stopped.
"""
import hashlib
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor, as_completed
from itertools import product
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from ..config import ExperimentConfig
from ..errors import ConfigError
from ..schema.experiments import SweepResult
from ..schema.series import TimeSeriesTable
from ..schema.targets import TargetRepresentation
from .pipeline import CellJob, dataset_windows, prepare_dataset, train_cell
from .splits import make_splits, select_step, split_windows

logger = logging.getLogger(__name__)

MAX_SEQUENCE_LENGTH = 13

_worker_table: Optional[TimeSeriesTable] = None


def derive_seed(master: int, *key) -> int:
    text = ":".join([str(master)] + [str(k) for k in key])
    return int(hashlib.sha256(text.encode("utf-8")).hexdigest()[:8], 16)


def _cell_file(out_dir: str, job: CellJob) -> str:
    key = hashlib.sha256(f"{job.config.config_hash()}:{job.seed}:{job.label}".encode()).hexdigest()[:20]
    return os.path.join(out_dir, "cells", f"{key}.json")


def _load_cell(path: str) -> Optional[SweepResult]:
    if not os.path.exists(path):
        return None
    try:
        with open(path, "r", encoding="utf-8") as f:
            result = SweepResult.from_dict(json.load(f))
    except (json.JSONDecodeError, KeyError, ValueError):
        logger.warning(f"⚠️ Ignoring unreadable cell file {path}")
        return None
    return result if result.ok else None


def _store_cell(path: str, result: SweepResult):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as f:
        json.dump(result.to_dict(), f, indent=2)
    os.replace(tmp, path)


def _init_worker(table: TimeSeriesTable):
    global _worker_table
    _worker_table = table


def _run_in_worker(job: CellJob) -> SweepResult:
    return train_cell(job, _worker_table)


def run_cells(jobs: Sequence[CellJob], table: TimeSeriesTable, workers: int = 1,
              out_dir: Optional[str] = None) -> List[SweepResult]:
    """
    Runs jobs inline (workers=1) or on a process pool; results keep job order.
    Cells already stored under `out_dir` are loaded instead of retrained.
    """
    results: Dict[int, SweepResult] = {}
    pending = []
    for i, job in enumerate(jobs):
        cached = _load_cell(_cell_file(out_dir, job)) if out_dir else None
        if cached is not None:
            logger.info(f"♻️ Reusing finished cell {job.axis} {job.label}")
            results[i] = cached
        else:
            pending.append(i)

    def finish(i: int, result: SweepResult):
        results[i] = result
        if out_dir and result.ok:
            _store_cell(_cell_file(out_dir, jobs[i]), result)

    if workers <= 1 or len(pending) <= 1:
        for i in pending:
            finish(i, train_cell(jobs[i], table))
    else:
        with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker, initargs=(table,)) as pool:
            futures = {pool.submit(_run_in_worker, jobs[i]): i for i in pending}
            for future in as_completed(futures):
                finish(futures[future], future.result())

    ordered = [results[i] for i in range(len(jobs))]
    failed = sum(not r.ok for r in ordered)
    logger.info(f"✅ {len(ordered)} cells done, {failed} failed")
    return ordered


def _cell_config(base: ExperimentConfig, seed: int, overrides: Sequence[str]) -> ExperimentConfig:
    return base.with_overrides(list(overrides) + [f"seed={seed}"])


def _log_path(out_dir: Optional[str], name: str) -> Optional[str]:
    return os.path.join(out_dir, "logs", f"{name}.csv") if out_dir else None


def representation_cells(config: ExperimentConfig) -> List[List[str]]:
    """Explicit `sweeps.cells` rows, else the full time x irradiance product."""
    if config.sweeps.cells:
        return [list(c) for c in config.sweeps.cells]
    return [[t, i] for t, i in product(config.sweeps.time_reps, config.sweeps.irr_reps)]


def sweep_representations(table: TimeSeriesTable, config: ExperimentConfig,
                          cells: Optional[Sequence[Sequence[str]]] = None, workers: Optional[int] = None,
                          out_dir: Optional[str] = None) -> List[SweepResult]:
    """
    One model per (time representation, irradiance representation) cell,
    scored by validation MAE in GHI terms.
    """
    cells = [list(c) for c in cells] if cells is not None else representation_cells(config)
    jobs = []
    for time_rep, irr_rep in cells:
        kind = TargetRepresentation.parse(irr_rep)
        label = f"{time_rep}|{kind.value}"
        seed = derive_seed(config.seed, "representation", label)
        cfg = _cell_config(config, seed, [f"features.time_representation={time_rep}",
                                          f"target_representation={kind.value}"])
        jobs.append(CellJob("representation", label, cfg, seed, config.sweeps.step,
                            log_path=_log_path(out_dir, f"rep_{time_rep}_{kind.value}"),
                            params={"time_representation": time_rep, "target_representation": kind.value}))
    return run_cells(jobs, table, workers or config.workers, out_dir)


def common_validation_t0(table: TimeSeriesTable, config: ExperimentConfig, lengths: Sequence[int],
                         step_index: int) -> np.ndarray:
    """Validation t0 values (ns) present for every input length."""
    dataset = prepare_dataset(table, config)
    stamps = table.timestamps
    step = select_step(make_splits(config.splits, (stamps[0], stamps[-1])), step_index)
    common = None
    for T in lengths:
        _, valid = split_windows(dataset_windows(dataset, config, T), step)
        t0 = valid.t0s.asi8
        common = t0 if common is None else np.intersect1d(common, t0)
    return common if common is not None else np.array([], dtype=np.int64)


def sweep_sequence_length(table: TimeSeriesTable, config: ExperimentConfig,
                          lengths: Optional[Sequence[int]] = None, workers: Optional[int] = None,
                          out_dir: Optional[str] = None) -> List[SweepResult]:
    """
    One model per input length T; all cells are scored on the same
    validation t0 set.
    """
    lengths = [int(T) for T in (lengths or config.sweeps.lengths)]
    bad = [T for T in lengths if not 1 <= T <= MAX_SEQUENCE_LENGTH]
    if bad:
        raise ConfigError(f"Sequence lengths must be in 1..{MAX_SEQUENCE_LENGTH}, got {bad}")
    step_index = config.sweeps.step
    common = common_validation_t0(table, config, lengths, step_index)
    logger.info(f"📊 {len(common)} validation windows shared by lengths {lengths}")
    jobs = []
    for T in lengths:
        seed = derive_seed(config.seed, "sequence_length", T)
        cfg = _cell_config(config, seed, [f"windows.input_len={T}"])
        jobs.append(CellJob("sequence_length", str(T), cfg, seed, step_index, validate_t0=common,
                            log_path=_log_path(out_dir, f"seq_{T}"), params={"input_len": T}))
    return run_cells(jobs, table, workers or config.workers, out_dir)


def noise_ablation(table: TimeSeriesTable, config: ExperimentConfig,
                   feature_sets: Optional[Dict[str, object]] = None, steps: Optional[Sequence[int]] = None,
                   seeds: Optional[Sequence[int]] = None, workers: Optional[int] = None,
                   out_dir: Optional[str] = None) -> List[SweepResult]:
    """
    Noise channel on/off x feature set x split step x seed.

    "Off" trains with noise_width=0. The seed depends on the feature set,
    step and replicate only, so on/off cells are paired.
    """
    feature_sets = feature_sets or config.ablation.feature_sets
    seeds = list(seeds if seeds is not None else config.ablation.seeds)
    stamps = table.timestamps
    n_steps = len(make_splits(config.splits, (stamps[0], stamps[-1])))
    steps = list(steps) if steps is not None else list(range(n_steps))
    noise_on = config.ablation.noise_width
    if noise_on is None:
        noise_on = int(config.network.get("noise_width", 16))

    jobs = []
    for set_name, feature_set in feature_sets.items():
        for step_index in steps:
            for replicate in seeds:
                seed = derive_seed(config.seed, "ablation", set_name, step_index, replicate)
                for noise, width in (("on", noise_on), ("off", 0)):
                    label = f"noise={noise}|{set_name}|step{step_index + 1}|r{replicate}"
                    cfg = _cell_config(config, seed, [f"network.noise_width={width}"])
                    jobs.append(CellJob(
                        "ablation", label, cfg, seed, step_index, feature_set=feature_set,
                        log_path=_log_path(out_dir, f"ablate_{noise}_{set_name}_{step_index + 1}_{replicate}"),
                        params={"noise": noise, "noise_width": width, "feature_set": set_name,
                                "step_index": step_index, "replicate": replicate},
                    ))
    return run_cells(jobs, table, workers or config.workers, out_dir)


def results_frame(results: Sequence[SweepResult]) -> pd.DataFrame:
    rows = []
    for r in results:
        rows.append({"axis": r.axis, "label": r.label, "step": r.step, "val_mae": r.val_mae,
                     "poc_mae": r.poc_mae, "status": r.status, "seed": r.seed,
                     "config_hash": r.config_hash, "epochs": r.epochs, **r.params})
    return pd.DataFrame(rows)


def representation_grid(results: Sequence[SweepResult]) -> pd.DataFrame:
    """Rows: time representation; columns: irradiance representation; values: MAE."""
    frame = results_frame(results)
    return frame.pivot_table(index="time_representation", columns="target_representation",
                             values="val_mae", aggfunc="first")


def fss_table(results: Sequence[SweepResult]) -> pd.DataFrame:
    """Per-horizon FSS for each representation cell (one column per horizon)."""
    rows = {r.label: r.per_horizon_fss for r in results if r.ok and r.per_horizon_fss}
    frame = pd.DataFrame.from_dict(rows, orient="index")
    frame.columns = [f"t+{10 * (k + 1)}" for k in range(frame.shape[1])]
    return frame


def ablation_table(results: Sequence[SweepResult]) -> pd.DataFrame:
    """Median validation MAE over seeds: rows (noise, feature set), columns step."""
    frame = results_frame(results)
    frame["step_name"] = frame["step_index"].map(lambda i: f"Step {int(i) + 1}")
    return frame.pivot_table(index=["noise", "feature_set"], columns="step_name", values="val_mae", aggfunc="median")
