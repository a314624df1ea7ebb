"""
Skycast - CLI
Command-line entry point wiring ingest, training, evaluation and experiments.

Usage:
    python -m skycast synth --out out/synth
    python -m skycast train --config run.json --fast
    python -m skycast evaluate --baseline
"""
import argparse
import json
import logging
import os
import sys
from typing import Callable, Dict, Optional

import pandas as pd

from .config import Config, ExperimentConfig, apply_overrides, canonical_hash, load_config, read_json
from .errors import ConfigError, DataError, NumericalError, SkycastError
from .evaluation.report import report, write_report
from .experiments.analysis import representation_autocorrelation
from .experiments.importance import importance_histogram, permutation_importance
from .experiments.pipeline import (
    dataset_windows,
    evaluate_windows,
    load_table,
    prepare_dataset,
    train_model,
)
from .experiments.splits import fill_counts, in_range, make_splits, select_step, split_windows
from .experiments.sweeps import (
    ablation_table,
    fss_table,
    noise_ablation,
    representation_grid,
    results_frame,
    sweep_representations,
    sweep_sequence_length,
)
from .forecast.targets import ClampCounter, target_distribution
from .ingest.cache import save_window_cache
from .ingest.gaps import gap_profile
from .manifest import ManifestRecorder
from .network import checkpoint
from .schema.series import WindowSet
from .schema.synth import SynthConfig
from .synth import generate, write_dataset

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2

CHECKPOINT_FILE = "model.npz"
RESOLVED_CONFIG_FILE = "config.json"


def configure_logging(level: str):
    logging.basicConfig(level=getattr(logging, level.upper(), logging.INFO),
                        format='%(asctime)s - %(levelname)s - %(message)s', force=True)
    # Suppress noisy third-party logs
    for name in ("pvlib", "matplotlib", "numexpr"):
        logging.getLogger(name).setLevel(logging.WARNING)


def _overrides(args) -> list:
    overrides = list(args.set or [])
    if args.seed is not None:
        overrides.append(f"seed={args.seed}")
    if args.workers is not None:
        overrides.append(f"workers={args.workers}")
    if args.fast:
        overrides.append("fast=true")
    if getattr(args, "data", None):
        overrides.append(f"data.path={json.dumps(os.path.abspath(args.data))}")
    return overrides


def _experiment_config(args, fallback: Optional[str] = None) -> ExperimentConfig:
    path = args.config or (fallback if fallback and os.path.exists(fallback) else None)
    return load_config(path, _overrides(args))


def _out_dir(args, config: Optional[ExperimentConfig] = None) -> str:
    if args.out:
        return args.out
    if config is not None and config.out:
        return config.out
    return os.path.join(Config.OUT_DIR, args.command)


def _recorder(args, config: ExperimentConfig) -> ManifestRecorder:
    recorder = ManifestRecorder(args.command, config.config_hash(), config.to_dict(), {"master": config.seed})
    recorder.add_input(args.config)
    recorder.add_input(config.data.resolved_path())
    return recorder


def _write_json(path: str, payload, recorder: ManifestRecorder):
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, default=float)
    recorder.add_output(path)


def _write_csv(path: str, frame: pd.DataFrame, recorder: ManifestRecorder, index: bool = False):
    frame.to_csv(path, index=index)
    recorder.add_output(path)


def _plan(table, config: ExperimentConfig):
    stamps = table.timestamps
    return make_splits(config.splits, (stamps[0], stamps[-1]))


# --- synth ------------------------------------------------------------------

def cmd_synth(args) -> int:
    data = read_json(args.config or Config.DEFAULT_SYNTH)
    if args.seed is not None:
        data["seed"] = args.seed
    config = SynthConfig.from_dict(apply_overrides(data, args.set or []))
    out_dir = _out_dir(args)
    recorder = ManifestRecorder("synth", canonical_hash(config.to_dict()), config.to_dict(), {"master": config.seed})
    recorder.add_input(args.config)
    status = "failed"
    try:
        table, truth = generate(config)
        paths = write_dataset(table, truth, out_dir)
        recorder.add_outputs(paths.values())
        status = "ok"
    finally:
        recorder.write(out_dir, status)
    return EXIT_OK


# --- ingest -----------------------------------------------------------------

def cmd_ingest(args, config: ExperimentConfig, out_dir: str, recorder: ManifestRecorder) -> str:
    table = load_table(config)
    dataset = prepare_dataset(table, config)
    _write_json(os.path.join(out_dir, "gaps.json"), dataset.gaps.to_dict(), recorder)
    _write_csv(os.path.join(out_dir, "gap_profile.csv"), gap_profile(dataset.gaps, table), recorder)

    ws = dataset_windows(dataset, config)
    recorder.add_output(save_window_cache(ws, os.path.join(out_dir, "windows.parquet")))
    try:
        plan = fill_counts(_plan(table, config), ws)
        _write_json(os.path.join(out_dir, "splits.json"), plan.to_dict(), recorder)
    except DataError as e:
        logger.warning(f"⚠️ No split plan for this span: {e}")

    if len(ws):
        density, edges = target_distribution(config.target_representation, ws.arrays())
        frame = pd.DataFrame({"bin_lo": edges[:-1], "bin_hi": edges[1:], "density": density})
        _write_csv(os.path.join(out_dir, "target_distribution.csv"), frame, recorder)
    _write_csv(os.path.join(out_dir, "autocorrelation.csv"),
               representation_autocorrelation(table, config), recorder, index=True)
    logger.info(f"📂 Ingested {len(table)} rows into {len(ws)} windows ({len(ws.feature_names)} features)")
    return "ok"


# --- train ------------------------------------------------------------------

def cmd_train(args, config: ExperimentConfig, out_dir: str, recorder: ManifestRecorder) -> str:
    table = load_table(config)
    dataset = prepare_dataset(table, config)
    step = select_step(_plan(table, config), args.step)
    log_path = os.path.join(out_dir, "epochs.csv")
    model = train_model(dataset, config, step, log_path=log_path)
    recorder.add_output(log_path)

    recorder.add_output(checkpoint.save(model.net, os.path.join(out_dir, CHECKPOINT_FILE)))
    _write_json(os.path.join(out_dir, RESOLVED_CONFIG_FILE), config.to_dict(), recorder)
    _write_json(os.path.join(out_dir, "history.json"), {
        "step": step.name,
        "best_epoch": model.history.best_epoch,
        "best_val_mae": model.history.best_val_mae,
        "stopped_early": model.history.stopped_early,
        "epochs_run": model.history.epochs_run,
        "train_windows": len(model.train),
        "validate_windows": len(model.validate),
    }, recorder)
    logger.info(f"🧠 Trained {step.name}: best val MAE {model.history.best_val_mae:.3f} W/m² at epoch {model.history.best_epoch}")
    return "ok"


# --- evaluate / forecast ----------------------------------------------------

def _checkpoint_config(args) -> ExperimentConfig:
    fallback = None
    if getattr(args, "checkpoint", None):
        fallback = os.path.join(os.path.dirname(os.path.abspath(args.checkpoint)), RESOLVED_CONFIG_FILE)
    return _experiment_config(args, fallback)


def _evaluation_windows(args, config: ExperimentConfig, table, net) -> WindowSet:
    if net is not None:
        config = config.with_overrides([f"windows.input_len={net.config.seq_len}",
                                        f"target_representation={net.representation}"])
    ws = dataset_windows(prepare_dataset(table, config), config)
    if args.start or args.end:
        stamps = table.timestamps
        start = pd.Timestamp(args.start, tz="UTC") if args.start else stamps[0]
        end = pd.Timestamp(args.end, tz="UTC") + pd.Timedelta(days=1) if args.end else stamps[-1] + pd.Timedelta(seconds=1)
        return ws.subset(in_range(ws, (start, end)))
    step = select_step(_plan(table, config), config.evaluation.step)
    return split_windows(ws, step)[1]


def _load_network(args, recorder: ManifestRecorder):
    if args.baseline:
        return None
    if not args.checkpoint:
        raise ConfigError("Pass --checkpoint or --baseline")
    recorder.add_input(args.checkpoint)
    return checkpoint.load(args.checkpoint)


def cmd_evaluate(args, config: ExperimentConfig, out_dir: str, recorder: ManifestRecorder) -> str:
    net = _load_network(args, recorder)
    table = load_table(config)
    ws = _evaluation_windows(args, config, table, net)
    if len(ws) == 0:
        raise DataError("No complete windows in the evaluation range")
    counter = ClampCounter()
    records = evaluate_windows(net, ws, config, counter)
    ev = config.evaluation
    result = report(records, ev.clear_max, ev.overcast_min, ev.fss_metric, counter.clamped)
    recorder.add_outputs(write_report(result, out_dir, records, ev.density_bins))
    logger.info(f"📊 MAE {result.aggregate['mae']:.3f} W/m², POC {result.aggregate['poc_mae']:.3f}, FSS {result.aggregate['fss']:.3f}")
    return "ok"


def cmd_forecast(args, config: ExperimentConfig, out_dir: str, recorder: ManifestRecorder) -> str:
    net = _load_network(args, recorder)
    table = load_table(config)
    ws = _evaluation_windows(args, config, table, net)
    records = evaluate_windows(net, ws, config, ClampCounter())
    os.makedirs(out_dir, exist_ok=True)
    _write_csv(os.path.join(out_dir, "forecasts.csv"), records, recorder)
    logger.info(f"☀️ Wrote {len(ws)} window forecasts")
    return "ok"


# --- experiments ------------------------------------------------------------

def cmd_importance(args, config: ExperimentConfig, out_dir: str, recorder: ManifestRecorder) -> str:
    table = load_table(config)
    dataset = prepare_dataset(table, config)
    step = select_step(_plan(table, config), config.importance.step)
    model = train_model(dataset, config, step, log_path=os.path.join(out_dir, "epochs.csv"))
    recorder.add_output(checkpoint.save(model.net, os.path.join(out_dir, CHECKPOINT_FILE)))
    result = permutation_importance(model.net, model.validate.arrays(), config, config.importance.features,
                                    config.importance.repetitions, config.seed)
    _write_json(os.path.join(out_dir, "importance.json"), result.to_dict(), recorder)
    _write_csv(os.path.join(out_dir, "importance.csv"), result.to_frame(), recorder)
    _write_csv(os.path.join(out_dir, "importance_histogram.csv"),
               importance_histogram(result, config.importance.bins), recorder)
    return "ok"


def _sweep_status(results) -> str:
    failed = sum(not r.ok for r in results)
    if failed == len(results):
        raise NumericalError(f"All {failed} sweep cells failed")
    return "partial" if failed else "ok"


def cmd_sweep_rep(args, config: ExperimentConfig, out_dir: str, recorder: ManifestRecorder) -> str:
    results = sweep_representations(load_table(config), config, out_dir=out_dir)
    _write_csv(os.path.join(out_dir, "results.csv"), results_frame(results), recorder)
    _write_csv(os.path.join(out_dir, "representation_grid.csv"), representation_grid(results), recorder, index=True)
    _write_csv(os.path.join(out_dir, "fss.csv"), fss_table(results), recorder, index=True)
    return _sweep_status(results)


def cmd_sweep_seq(args, config: ExperimentConfig, out_dir: str, recorder: ManifestRecorder) -> str:
    results = sweep_sequence_length(load_table(config), config, out_dir=out_dir)
    frame = results_frame(results)
    _write_csv(os.path.join(out_dir, "results.csv"), frame, recorder)
    summary = frame[["input_len", "val_mae", "poc_mae"]].sort_values("input_len")
    _write_csv(os.path.join(out_dir, "sequence_length.csv"), summary, recorder)
    return _sweep_status(results)


def cmd_ablate_noise(args, config: ExperimentConfig, out_dir: str, recorder: ManifestRecorder) -> str:
    results = noise_ablation(load_table(config), config, out_dir=out_dir)
    _write_csv(os.path.join(out_dir, "results.csv"), results_frame(results), recorder)
    _write_csv(os.path.join(out_dir, "ablation.csv"), ablation_table(results), recorder, index=True)
    return _sweep_status(results)


COMMANDS: Dict[str, Callable] = {
    "ingest": cmd_ingest,
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "forecast": cmd_forecast,
    "importance": cmd_importance,
    "sweep-rep": cmd_sweep_rep,
    "sweep-seq": cmd_sweep_seq,
    "ablate-noise": cmd_ablate_noise,
}


def run_experiment_command(args) -> int:
    config = _checkpoint_config(args) if args.command in ("evaluate", "forecast") else _experiment_config(args)
    out_dir = _out_dir(args, config)
    os.makedirs(out_dir, exist_ok=True)
    recorder = _recorder(args, config)
    status = "failed"
    try:
        status = COMMANDS[args.command](args, config, out_dir, recorder)
    finally:
        recorder.write(out_dir, status)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="experiment (or synth) config JSON")
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--workers", type=int, help="worker processes for sweeps")
    common.add_argument("--fast", action="store_true", help="short training runs")
    common.add_argument("--out", help="output directory")
    common.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key (repeatable)")
    common.add_argument("--log-level", default=Config.LOG_LEVEL)

    parser = argparse.ArgumentParser(prog="skycast", description="Short-term solar irradiance forecasting")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("synth", parents=[common], help="generate a synthetic station dataset")

    for name, text in (("ingest", "gap report, gap profile and window cache"),
                       ("train", "train one model on a split step"),
                       ("evaluate", "score a checkpoint (or POC) and write the report"),
                       ("forecast", "write per-window forecasts"),
                       ("importance", "permutation feature importance"),
                       ("sweep-rep", "time x irradiance representation sweep"),
                       ("sweep-seq", "input sequence length sweep"),
                       ("ablate-noise", "noise channel on/off ablation")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--data", help="station CSV (overrides data.path)")
        if name == "train":
            p.add_argument("--step", type=int, default=-1, help="split step index, negative counts from the end")
        if name in ("evaluate", "forecast"):
            p.add_argument("--checkpoint", help="model checkpoint (.npz)")
            p.add_argument("--baseline", action="store_true", help="score the POC forecast, no model")
            p.add_argument("--start", help="first day (inclusive, UTC)")
            p.add_argument("--end", help="last day (inclusive, UTC)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code else EXIT_OK
    configure_logging(args.log_level)

    try:
        if args.command == "synth":
            return cmd_synth(args)
        return run_experiment_command(args)
    except SkycastError as e:
        logger.error(f"❌ {type(e).__name__}: {e}")
        return e.exit_code
    except Exception as e:
        logger.error(f"❌ Unexpected error: {e}", exc_info=True)
        return EXIT_UNEXPECTED


if __name__ == "__main__":
    sys.exit(main())
