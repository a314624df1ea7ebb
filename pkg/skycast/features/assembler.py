"""
Skycast Features - Assembler
Evaluates FeatureSpec lists against a table in dependency order.
"""
import json
import logging
import os
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence

import numpy as np

from ..config import PACKAGE_DATA
from ..errors import ConfigError, DataError
from ..schema.features import FeatureMatrix, FeatureSpec, Normalization, TransformKind
from ..schema.series import TimeSeriesTable
from ..schema.site import SiteConfig
from . import time_features as tf
from . import transforms

logger = logging.getLogger(__name__)

TIME_REPRESENTATIONS = ("tod_toy", "trig_tod_toy", "tm", "trig_tm")
_TM_NAMES = {"sunrise": "time_from_sunrise", "solar_noon": "time_to_solar_noon", "sunset": "time_to_sunset"}


@dataclass(frozen=True)
class FeatureOptions:
    """Interpretation switches shared by every transform."""
    literal_cyclic: bool = False
    lag_unit: str = "minutes"
    spacing_s: int = 600
    cadence_s: int = 60
    csi_eps: float = transforms.CSI_EPS
    csi_ceiling: float = transforms.CSI_CEILING

    @classmethod
    def from_config(cls, features, spacing_s: int = 600) -> "FeatureOptions":
        return cls(
            literal_cyclic=features.literal_cyclic,
            lag_unit=features.lag_unit,
            spacing_s=spacing_s,
            csi_eps=features.csi_eps,
            csi_ceiling=features.csi_ceiling,
        )


def time_representation_specs(name: str) -> List[FeatureSpec]:
    """
    Specs for a time representation: tod_toy, trig_tod_toy, tm, trig_tm,
    or several of them joined with '+'.
    """
    specs: List[FeatureSpec] = []
    for part in [p.strip() for p in name.split("+") if p.strip()]:
        if part == "tod_toy":
            specs += [FeatureSpec("tod", [], "tod", group="time"), FeatureSpec("toy", [], "toy", group="time")]
        elif part == "trig_tod_toy":
            for source in ("tod", "toy"):
                for func in ("sin", "cos"):
                    specs.append(FeatureSpec(f"{func}_{source}", [], "cyclic", {"source": source, "func": func}, group="time"))
        elif part == "tm":
            specs += [FeatureSpec(_TM_NAMES[e], [], "tm", {"event": e}, group="time") for e in tf.MILESTONES]
        elif part == "trig_tm":
            for event in tf.MILESTONES:
                for func in ("sin", "cos"):
                    specs.append(FeatureSpec(f"{func}_{_TM_NAMES[event]}", [], "cyclic",
                                             {"source": f"tm:{event}", "func": func}, group="time"))
        else:
            raise ConfigError(f"Unknown time representation '{part}', expected {TIME_REPRESENTATIONS} or a '+' join")
    seen, unique = set(), []
    for spec in specs:
        if spec.name not in seen:
            seen.add(spec.name)
            unique.append(spec)
    return unique


def with_time_representation(specs: Sequence[FeatureSpec], name: str) -> List[FeatureSpec]:
    """
    Replaces the `time` group of a spec list with the named representation.

    A list without time features is returned unchanged.
    """
    positions = [i for i, s in enumerate(specs) if s.group == "time"]
    if not positions:
        return list(specs)
    at = positions[0]
    rest = [s for s in specs if s.group != "time"]
    before = [s for s in specs[:at] if s.group != "time"]
    return before + time_representation_specs(name) + rest[len(before):]


def load_manifest(name_or_path: str) -> List[FeatureSpec]:
    """
    Loads a feature manifest: a shipped name (srrl_full, desk, top10) or a JSON path.
    """
    path = name_or_path
    if not os.path.exists(path):
        path = os.path.join(PACKAGE_DATA, f"features_{name_or_path}.json")
    if not os.path.exists(path):
        raise ConfigError(f"Feature manifest '{name_or_path}' not found")
    with open(path, "r", encoding="utf-8") as f:
        data = json.load(f)
    specs = [FeatureSpec.from_dict(item) for item in data["features"]]
    _check_unique(specs)
    return specs


def _check_unique(specs: Sequence[FeatureSpec]):
    names = [s.name for s in specs]
    duplicates = sorted({n for n in names if names.count(n) > 1})
    if duplicates:
        raise ConfigError(f"Duplicate feature names: {duplicates}")


def dependency_order(specs: Sequence[FeatureSpec]) -> List[FeatureSpec]:
    """
    Topological order over spec-to-spec inputs, stable in spec order.

    Raises:
        ConfigError: on a dependency cycle
    """
    _check_unique(specs)
    by_name = {s.name: s for s in specs}
    deps = {
        s.name: [i for i in s.inputs if i in by_name and i != s.name] if s.transform != TransformKind.RAW else []
        for s in specs
    }
    ordered, state = [], {}

    def visit(name: str, chain: List[str]):
        if state.get(name) == "done":
            return
        if state.get(name) == "active":
            cycle = chain[chain.index(name):] + [name]
            raise ConfigError(f"Cyclic feature dependency: {' -> '.join(cycle)}")
        state[name] = "active"
        for dep in deps[name]:
            visit(dep, chain + [name])
        state[name] = "done"
        ordered.append(by_name[name])

    for spec in specs:
        visit(spec.name, [])
    return ordered


def _source_values(source: str, index, site: Optional[SiteConfig]) -> np.ndarray:
    if source == "tod":
        return tf.time_of_day_series(index)
    if source == "toy":
        return tf.time_of_year_series(index)
    if source.startswith("tm:"):
        return tf.milestone_series(index, _need_site(site, source), source.split(":", 1)[1])
    raise ConfigError(f"Unknown cyclic source '{source}'")


def _need_site(site: Optional[SiteConfig], what: str) -> SiteConfig:
    if site is None:
        raise ConfigError(f"Feature '{what}' needs a site")
    return site


def compute_spec(spec: FeatureSpec, columns: Dict[str, np.ndarray], index, site: Optional[SiteConfig],
                 options: FeatureOptions) -> np.ndarray:
    """Evaluates one spec; `columns` holds table and already computed spec columns."""
    kind, p = spec.transform, spec.params

    def col(i: int) -> np.ndarray:
        name = spec.inputs[i]
        if name not in columns:
            raise DataError(f"Feature '{spec.name}' needs missing input column '{name}'")
        return columns[name]

    if kind == TransformKind.RAW:
        return col(0).copy()
    if kind == TransformKind.TOD:
        return tf.time_of_day_series(index)
    if kind == TransformKind.TOY:
        return tf.time_of_year_series(index)
    if kind == TransformKind.TM:
        return tf.milestone_series(index, _need_site(site, spec.name), p.get("event", "sunrise"))
    if kind == TransformKind.FLAG:
        return tf.flag_series(index, _need_site(site, spec.name), p.get("condition", "day"))
    if kind == TransformKind.CYCLIC:
        x = col(0) if spec.inputs else _source_values(p.get("source", "tod"), index, site)
        literal = bool(p.get("literal", options.literal_cyclic))
        s, c = tf.cyclic_encode(x, float(p.get("period", 1.0)), literal=literal)
        return s if p.get("func", "sin") == "sin" else c
    if kind == TransformKind.CSI:
        return transforms.clear_sky_index(col(0), col(1), float(p.get("eps", options.csi_eps)),
                                          float(p.get("ceiling", options.csi_ceiling)))
    if kind == TransformKind.CS_DEV:
        return transforms.clear_sky_deviation(col(0), col(1))
    if kind == TransformKind.LAG:
        k = int(p["k"])
        if p.get("unit", options.lag_unit) == "forecast_steps":
            k *= max(options.spacing_s // options.cadence_s, 1)
        return transforms.lagged(col(0), k)
    if kind in (TransformKind.ROLL_MEAN, TransformKind.ROLL_MEDIAN, TransformKind.ROLL_STD):
        return transforms.rolling_stat(col(0), int(p["w"]), kind.value.split("_", 1)[1])
    if kind == TransformKind.WIND_COMPONENTS:
        ns, ew = transforms.wind_components(col(0), col(1))
        return ns if p.get("component", "ns") == "ns" else ew
    if kind == TransformKind.COS_ZENITH:
        return transforms.cos_zenith(col(0))
    if kind == TransformKind.CNI:
        return transforms.cosine_normal_irradiance(col(0), col(1))
    if kind == TransformKind.SUN_POSITION:
        ns, ew = transforms.sun_position_components(col(0), col(1))
        return ns if p.get("axis", "ns") == "ns" else ew
    raise ConfigError(f"Unsupported transform {kind}")


def engineer(table: TimeSeriesTable, specs: Sequence[FeatureSpec], site: Optional[SiteConfig] = None,
             options: FeatureOptions = FeatureOptions()) -> TimeSeriesTable:
    """
    Adds every spec column to the table, dependencies first.

    Missing inputs propagate as missing outputs. Raw specs only check that
    their column exists.

    Args:
        table: station table, usually already augmented with clear-sky columns
        specs: feature specs
        site: needed by time-milestone and flag features
        options: interpretation switches

    Returns:
        TimeSeriesTable with the original and the engineered columns
    """
    options = replace(options, cadence_s=table.cadence_s)
    frame = table.to_frame()
    columns = {name: frame[name].to_numpy(dtype=float) for name in frame.columns}
    added = {}
    for spec in dependency_order(specs):
        if spec.transform != TransformKind.RAW and spec.name in table:
            raise ConfigError(f"Feature '{spec.name}' would overwrite a table column")
        values = compute_spec(spec, columns, table.timestamps, site, options)
        if spec.transform == TransformKind.RAW and spec.inputs[0] == spec.name:
            continue
        columns[spec.name] = values
        added[spec.name] = values
    logger.info(f"🧮 Engineered {len(added)} feature columns ({len(specs)} specs)")
    return table.with_columns(added)


def assemble(table: TimeSeriesTable, specs: Sequence[FeatureSpec], normalize: bool = True,
             site: Optional[SiteConfig] = None, normalization: Optional[Normalization] = None,
             options: FeatureOptions = FeatureOptions()) -> FeatureMatrix:
    """
    Builds the N x F feature matrix in spec order.

    Rows with any missing engineered value are dropped and counted. With
    `normalize`, a z-score is fitted on the remaining rows unless a frozen
    `normalization` is passed in (inference reuses training statistics).
    """
    names = [s.name for s in specs]
    engineered = engineer(table, specs, site, options)
    if names:
        values = engineered.select(names).to_frame().to_numpy()
        complete = ~np.isnan(values).any(axis=1)
    else:
        values = np.zeros((len(table), 0))
        complete = np.ones(len(table), dtype=bool)
    rows = values[complete]
    excluded = int((~complete).sum())
    if excluded:
        logger.info(f"⚠️ Excluded {excluded} rows with missing engineered values")

    if normalization is None:
        normalization = Normalization.fit(names, rows) if normalize else Normalization.identity(names)
    elif list(normalization.feature_names) != names:
        raise ConfigError("Normalization feature names do not match the feature list")
    return FeatureMatrix(names, normalization.apply(rows), normalization, table.timestamps[complete], excluded)
