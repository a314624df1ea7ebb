"""
Skycast Experiments - Pipeline
Table -> features -> windows -> trained network -> scored forecasts.
"""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from ..config import ExperimentConfig
from ..errors import ConfigError, DataError
from ..evaluation.report import per_horizon_table, records_from
from ..features.assembler import FeatureOptions, engineer, load_manifest, with_time_representation
from ..forecast.persistence import poc_windows
from ..forecast.targets import ClampCounter, decode_windows, encode_windows
from ..geometry.solar import CLEAR_SKY_COLUMNS, augment
from ..ingest.csv_parser import load_column_mapping, parse_csv
from ..ingest.gaps import detect_gaps
from ..ingest.windows import build_windows
from ..network.model import Network, init_network
from ..network.optim import FitHistory, TrainingData, evaluation_noise, fit, predict
from ..schema.experiments import SplitStep, SweepResult
from ..schema.features import FeatureSpec, Normalization, TransformKind
from ..schema.series import GapReport, TimeSeriesTable, WindowArrays, WindowSet
from ..schema.targets import TargetRepresentation
from .splits import make_splits, select_step, split_windows

logger = logging.getLogger(__name__)

FeatureSet = Union[str, Sequence[str]]


@dataclass
class Dataset:
    """Engineered table, its gaps and the ordered model inputs."""
    table: TimeSeriesTable
    gaps: GapReport
    specs: List[FeatureSpec]
    feature_names: List[str]


@dataclass
class TrainedModel:
    net: Network
    history: FitHistory
    train: WindowSet
    validate: WindowSet
    step: SplitStep


def load_table(config: ExperimentConfig, path: Optional[str] = None) -> TimeSeriesTable:
    """Parses the configured station CSV and trims it to data.start/data.end."""
    path = path or config.data.resolved_path()
    if not path:
        raise ConfigError("No data path configured (data.path)")
    mapping = load_column_mapping() if config.data.column_mapping == "srrl" else (
        load_column_mapping(config.data.column_mapping) if config.data.column_mapping else None
    )
    table = parse_csv(path, mapping, config.data.cadence_s, config.data.strict_schema)
    if config.data.start or config.data.end:
        stamps = table.timestamps
        table = table.between(config.data.start or stamps[0], config.data.end or stamps[-1] + pd.Timedelta(seconds=1))
    return table


def _dependencies(spec: FeatureSpec, by_name: Dict[str, FeatureSpec], seen: set) -> List[FeatureSpec]:
    out = []
    if spec.transform == TransformKind.RAW:
        return out
    for name in spec.inputs:
        if name in by_name and name not in seen:
            seen.add(name)
            out += _dependencies(by_name[name], by_name, seen) + [by_name[name]]
    return out


def feature_set_specs(feature_set: FeatureSet, base_manifest: str) -> Tuple[List[FeatureSpec], List[str]]:
    """
    Resolves a feature set into (specs to engineer, model input names).

    A string names a manifest; a list selects features from the base
    manifest, pulling in the specs they are computed from.
    """
    if isinstance(feature_set, str):
        specs = load_manifest(feature_set)
        return specs, [s.name for s in specs]
    base = load_manifest(base_manifest)
    by_name = {s.name: s for s in base}
    unknown = [n for n in feature_set if n not in by_name]
    if unknown:
        raise ConfigError(f"Features {unknown} are not in manifest '{base_manifest}'")
    seen, specs = set(feature_set), []
    for name in feature_set:
        specs += _dependencies(by_name[name], by_name, seen)
    specs += [by_name[n] for n in feature_set]
    return specs, list(feature_set)


def prepare_dataset(table: TimeSeriesTable, config: ExperimentConfig,
                    feature_set: Optional[FeatureSet] = None) -> Dataset:
    """
    Adds clear-sky columns when absent, engineers the feature set with the
    configured time representation and detects gaps over the model inputs.

    Args:
        table: parsed station table
        config: experiment config
        feature_set: manifest name or feature list, default features.manifest

    Returns:
        Dataset
    """
    specs, names = feature_set_specs(feature_set or config.features.manifest, config.features.manifest)
    old_time = {s.name for s in specs if s.group == "time"}
    specs = with_time_representation(specs, config.features.time_representation)
    if old_time:
        wanted = (set(names) - old_time) | {s.name for s in specs if s.group == "time"}
        names = [s.name for s in specs if s.name in wanted]

    if any(c not in table for c in CLEAR_SKY_COLUMNS):
        table = augment(table, config.site)
    options = FeatureOptions.from_config(config.features, config.windows.spacing_s)
    engineered = engineer(table, specs, config.site, options)
    required = list(dict.fromkeys(names + ["ghi", "ghi_cs"]))
    gaps = detect_gaps(engineered, required)
    return Dataset(engineered, gaps, specs, names)


def dataset_windows(dataset: Dataset, config: ExperimentConfig, T: Optional[int] = None) -> WindowSet:
    w = config.windows
    return build_windows(
        dataset.table,
        dataset.gaps,
        T or w.input_len,
        spacing_s=w.spacing_s,
        horizons_s=w.horizons_s,
        daylight_min_ghi_cs=w.daylight_min_ghi_cs,
        feature_names=dataset.feature_names,
        stride_s=w.stride_s,
        cover_column=w.cover_column,
        csi_eps=config.features.csi_eps,
        csi_ceiling=config.features.csi_ceiling,
    )


def training_data(arrays: WindowArrays, normalization: Normalization, kind: TargetRepresentation) -> TrainingData:
    return TrainingData(
        inputs=normalization.apply(arrays.inputs),
        targets=encode_windows(kind, arrays),
        ghi_true=arrays.target_ghi,
        decode=lambda pred: decode_windows(kind, pred, arrays),
    )


def train_model(dataset: Dataset, config: ExperimentConfig, step: SplitStep, seed: Optional[int] = None,
                fast: Optional[bool] = None, log_path: Optional[str] = None,
                validate_t0: Optional[np.ndarray] = None, **network_overrides) -> TrainedModel:
    """
    Trains one network on a split step.

    Raises:
        DataError: no training windows survive gaps and the daylight rule
    """
    seed = config.seed if seed is None else int(seed)
    fast = config.fast if fast is None else fast
    ws = dataset_windows(dataset, config)
    train_ws, valid_ws = split_windows(ws, step)
    if validate_t0 is not None:
        valid_ws = valid_ws.subset(np.isin(valid_ws.t0s.asi8, validate_t0))
    if len(train_ws) == 0:
        raise DataError(f"No complete training windows in {step.name} "
                        f"({len(ws)} windows overall, coverage {dataset.gaps.coverage_fraction:.3f})")
    logger.info(f"📊 {step.name}: {len(train_ws)} training and {len(valid_ws)} validation windows")

    kind = config.target_representation
    train_arrays, valid_arrays = train_ws.arrays(), valid_ws.arrays()
    normalization = Normalization.fit(dataset.feature_names, train_arrays.inputs)
    net_config = config.network_config(len(dataset.feature_names), ws.input_len, seed=seed, **network_overrides)
    net = init_network(net_config, seed)
    net.feature_names = list(dataset.feature_names)
    net.representation = kind.value
    net.normalization = normalization

    history = fit(
        net,
        training_data(train_arrays, normalization, kind),
        training_data(valid_arrays, normalization, kind) if len(valid_ws) else None,
        config.training,
        seed=seed,
        log_path=log_path,
        fast=fast,
    )
    return TrainedModel(net, history, train_ws, valid_ws, step)


def forecast_arrays(net: Network, arrays: WindowArrays, config: ExperimentConfig,
                    counter: Optional[ClampCounter] = None) -> np.ndarray:
    """Decoded GHI forecasts (N, H) from a trained network."""
    if net.normalization is None or net.representation is None:
        raise ConfigError("Network has no input normalization or representation attached")
    noise = evaluation_noise(net, config.training, config.seed)
    pred = predict(net, net.normalization.apply(arrays.inputs), noise)
    return decode_windows(net.representation, pred, arrays, counter)


def check_inputs(net: Network, ws: WindowSet):
    if list(ws.feature_names) != list(net.feature_names):
        raise ConfigError(f"Window features {list(ws.feature_names)} do not match the network inputs {net.feature_names}")
    if ws.input_len != net.config.seq_len:
        raise ConfigError(f"Window length {ws.input_len} does not match the network sequence length {net.config.seq_len}")


def evaluate_windows(net: Optional[Network], ws: WindowSet, config: ExperimentConfig,
                     counter: Optional[ClampCounter] = None) -> pd.DataFrame:
    """
    Forecast records for every window; without a network the POC
    forecast stands in for the model (baseline mode).
    """
    arrays = ws.arrays()
    poc = poc_windows(arrays)
    if net is None:
        pred = poc
    else:
        check_inputs(net, ws)
        pred = forecast_arrays(net, arrays, config, counter)
    horizons_min = [h // 60 for h in ws.horizon_offsets]
    return records_from(arrays.t0, arrays.target_ghi, pred, poc, horizons_min, arrays.cloud_cover)


def cell_result(axis: str, label: str, model: TrainedModel, config: ExperimentConfig, seed: int,
                params: Dict[str, Any]) -> SweepResult:
    if len(model.validate) == 0:
        raise DataError(f"No validation windows in {model.step.name}")
    records = evaluate_windows(model.net, model.validate, config)
    table = per_horizon_table(records, config.evaluation.fss_metric)
    aggregate = table.iloc[-1]
    return SweepResult(
        axis=axis,
        label=label,
        val_mae=float(aggregate["mae"]),
        poc_mae=float(aggregate["poc_mae"]),
        seed=seed,
        config_hash=config.config_hash(),
        step=model.step.name,
        params=params,
        per_horizon_fss=[float(v) for v in table["fss"].iloc[:-1]],
        epochs=model.history.epochs_run,
    )


@dataclass
class CellJob:
    """One sweep cell: a fully resolved config plus its coordinates."""
    axis: str
    label: str
    config: ExperimentConfig
    seed: int
    step_index: int = 0
    feature_set: Optional[FeatureSet] = None
    validate_t0: Optional[np.ndarray] = None
    log_path: Optional[str] = None
    params: Dict[str, Any] = field(default_factory=dict)


def train_cell(job: CellJob, table: TimeSeriesTable) -> SweepResult:
    """
    Trains and scores one cell. Any failure marks the cell failed instead
    of raising, so a sweep can continue.
    """
    config = job.config
    try:
        dataset = prepare_dataset(table, config, job.feature_set)
        stamps = table.timestamps
        plan = make_splits(config.splits, (stamps[0], stamps[-1]))
        step = select_step(plan, job.step_index)
        model = train_model(dataset, config, step, seed=job.seed, log_path=job.log_path,
                            validate_t0=job.validate_t0)
        result = cell_result(job.axis, job.label, model, config, job.seed, job.params)
        logger.info(f"✅ {job.axis} {job.label}: val MAE {result.val_mae:.3f} W/m² (POC {result.poc_mae:.3f})")
        return result
    except Exception as e:
        logger.error(f"❌ Cell {job.axis} {job.label} failed: {e}", exc_info=True)
        return SweepResult(job.axis, job.label, float("nan"), job.seed, config.config_hash(),
                           status="failed", error=f"{type(e).__name__}: {e}", params=job.params)
