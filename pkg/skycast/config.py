"""
Skycast - Configuration
Environment settings and the declarative experiment config.
"""
import copy
import hashlib
import json
import logging
import os
from dataclasses import dataclass, field, fields
from typing import Any, Dict, List, Optional, Sequence

from .errors import ConfigError
from .schema.network import NetworkConfig, TrainingConfig
from .schema.site import SiteConfig
from .schema.targets import TargetRepresentation

logger = logging.getLogger(__name__)

PACKAGE_DATA = os.path.join(os.path.dirname(__file__), "data")


class Config:
    # Directories
    DATA_DIR = os.getenv("SKYCAST_DATA_DIR", os.path.join(os.getcwd(), "data"))
    OUT_DIR = os.getenv("SKYCAST_OUT_DIR", os.path.join(os.getcwd(), "out"))

    # Runtime
    LOG_LEVEL = os.getenv("SKYCAST_LOG_LEVEL", "INFO")
    WORKERS = int(os.getenv("SKYCAST_WORKERS", "1"))

    # Shipped defaults
    DEFAULT_EXPERIMENT = os.path.join(PACKAGE_DATA, "experiment_default.json")
    DEFAULT_SYNTH = os.path.join(PACKAGE_DATA, "synth_default.json")
    COLUMN_MAPPING = os.path.join(PACKAGE_DATA, "srrl_columns.json")

    # Test gates
    RUN_SLOW = os.getenv("SKYCAST_RUN_SLOW", "0") == "1"
    NREL_CSV = os.getenv("SKYCAST_NREL_CSV")


def _section(cls, data: Optional[Dict[str, Any]], name: str):
    data = dict(data or {})
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"Unknown keys in '{name}': {sorted(unknown)}")
    try:
        return cls(**data)
    except TypeError as e:
        raise ConfigError(f"Invalid '{name}' block: {e}")


@dataclass
class DataConfig:
    path: Optional[str] = None
    cadence_s: int = 60
    column_mapping: Optional[str] = "srrl"
    strict_schema: bool = False
    start: Optional[str] = None
    end: Optional[str] = None

    def resolved_path(self) -> Optional[str]:
        if self.path is None:
            return None
        return self.path if os.path.isabs(self.path) else os.path.join(Config.DATA_DIR, self.path)


@dataclass
class FeaturesConfig:
    manifest: str = "desk"
    time_representation: str = "tod_toy"
    literal_cyclic: bool = False
    lag_unit: str = "minutes"
    csi_eps: float = 10.0
    csi_ceiling: float = 2.0

    def __post_init__(self):
        if self.lag_unit not in ("minutes", "forecast_steps"):
            raise ConfigError(f"lag_unit must be 'minutes' or 'forecast_steps', got {self.lag_unit}")


@dataclass
class WindowConfig:
    input_len: int = 1
    spacing_s: int = 600
    horizons_s: List[int] = field(default_factory=lambda: [600 * h for h in range(1, 13)])
    stride_s: Optional[int] = None
    daylight_min_ghi_cs: Optional[float] = 10.0
    cover_column: Optional[str] = "cdoc_total_cloud_cover"


@dataclass
class SplitConfig:
    """Either `steps` (explicit date ranges) or the rolling day counts."""
    start: Optional[str] = None
    initial_train_days: int = 60
    validate_days: int = 20
    n_steps: int = 3
    steps: List[Dict[str, Any]] = field(default_factory=list)


@dataclass
class SweepConfig:
    time_reps: List[str] = field(default_factory=lambda: ["tod_toy", "trig_tod_toy", "tm", "trig_tm"])
    irr_reps: List[str] = field(default_factory=lambda: [k.value for k in TargetRepresentation])
    cells: List[List[str]] = field(default_factory=list)
    lengths: List[int] = field(default_factory=lambda: [1, 4, 7, 10, 13])
    step: int = 0


@dataclass
class ImportanceConfig:
    repetitions: int = 5
    step: int = -1
    features: Optional[List[str]] = None
    bins: int = 20

    def __post_init__(self):
        if self.repetitions < 1:
            raise ConfigError(f"importance.repetitions must be >= 1, got {self.repetitions}")


@dataclass
class AblationConfig:
    feature_sets: Dict[str, Any] = field(default_factory=lambda: {"all": "desk", "top10": "top10"})
    noise_width: Optional[int] = None
    seeds: List[int] = field(default_factory=lambda: [0])


@dataclass
class EvaluationConfig:
    clear_max: float = 20.0
    overcast_min: float = 80.0
    fss_metric: str = "mae"
    density_bins: int = 50
    step: int = -1

    def __post_init__(self):
        if self.clear_max > self.overcast_min:
            raise ConfigError(f"clear_max ({self.clear_max}) must not exceed overcast_min ({self.overcast_min})")
        if self.fss_metric not in ("mae", "rmse"):
            raise ConfigError(f"fss_metric must be 'mae' or 'rmse', got {self.fss_metric}")


@dataclass
class ExperimentConfig:
    """
    Resolved experiment configuration.

    Built from the shipped defaults merged with a user file and any
    `--set key=value` overrides; `config_hash()` identifies the result.
    """
    site: SiteConfig
    data: DataConfig = field(default_factory=DataConfig)
    features: FeaturesConfig = field(default_factory=FeaturesConfig)
    windows: WindowConfig = field(default_factory=WindowConfig)
    target_representation: TargetRepresentation = TargetRepresentation.DELTA_CSI
    splits: SplitConfig = field(default_factory=SplitConfig)
    network: Dict[str, Any] = field(default_factory=dict)
    training: TrainingConfig = field(default_factory=TrainingConfig)
    sweeps: SweepConfig = field(default_factory=SweepConfig)
    importance: ImportanceConfig = field(default_factory=ImportanceConfig)
    ablation: AblationConfig = field(default_factory=AblationConfig)
    evaluation: EvaluationConfig = field(default_factory=EvaluationConfig)
    seed: int = 0
    workers: int = 1
    fast: bool = False
    out: Optional[str] = None

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"Unknown config sections: {sorted(unknown)}")
        if "site" not in data:
            raise ConfigError("Config has no 'site' block")
        network = dict(data.get("network", {}))
        # Validate early; input_features and seq_len are filled per run.
        NetworkConfig.from_dict({**network, "input_features": 1, "seq_len": 1})
        return cls(
            site=SiteConfig.from_dict(data["site"]),
            data=_section(DataConfig, data.get("data"), "data"),
            features=_section(FeaturesConfig, data.get("features"), "features"),
            windows=_section(WindowConfig, data.get("windows"), "windows"),
            target_representation=TargetRepresentation.parse(data.get("target_representation", "DELTA_CSI")),
            splits=_section(SplitConfig, data.get("splits"), "splits"),
            network=network,
            training=TrainingConfig.from_dict(data.get("training", {})),
            sweeps=_section(SweepConfig, data.get("sweeps"), "sweeps"),
            importance=_section(ImportanceConfig, data.get("importance"), "importance"),
            ablation=_section(AblationConfig, data.get("ablation"), "ablation"),
            evaluation=_section(EvaluationConfig, data.get("evaluation"), "evaluation"),
            seed=int(data.get("seed", 0)),
            workers=int(data.get("workers", 1)),
            fast=bool(data.get("fast", False)),
            out=data.get("out"),
        )

    def to_dict(self) -> Dict[str, Any]:
        def plain(obj):
            return {f.name: copy.deepcopy(getattr(obj, f.name)) for f in fields(obj)}

        return {
            "site": self.site.to_dict(),
            "data": plain(self.data),
            "features": plain(self.features),
            "windows": plain(self.windows),
            "target_representation": self.target_representation.value,
            "splits": plain(self.splits),
            "network": dict(self.network),
            "training": self.training.to_dict(),
            "sweeps": plain(self.sweeps),
            "importance": plain(self.importance),
            "ablation": plain(self.ablation),
            "evaluation": plain(self.evaluation),
            "seed": self.seed,
            "workers": self.workers,
            "fast": self.fast,
            "out": self.out,
        }

    def config_hash(self) -> str:
        """sha256 of the canonical JSON form; run-location keys are excluded."""
        payload = self.to_dict()
        for key in ("workers", "out"):
            payload.pop(key, None)
        return canonical_hash(payload)

    def network_config(self, input_features: int, seq_len: int, **overrides) -> NetworkConfig:
        data = {**self.network, **overrides, "input_features": input_features, "seq_len": seq_len}
        data.setdefault("seed", self.seed)
        return NetworkConfig.from_dict(data)

    def with_overrides(self, overrides: Sequence[str]) -> "ExperimentConfig":
        return ExperimentConfig.from_dict(apply_overrides(self.to_dict(), overrides))


def canonical_hash(payload: Any) -> str:
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def deep_merge(base: Dict[str, Any], update: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in update.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict) and key not in ("feature_sets",):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def parse_override(text: str):
    """'a.b.c=value' -> (['a','b','c'], value). Values are JSON when they parse as JSON."""
    if "=" not in text:
        raise ConfigError(f"Override '{text}' is not of the form key=value")
    key, raw = text.split("=", 1)
    path = [p for p in key.strip().split(".") if p]
    if not path:
        raise ConfigError(f"Override '{text}' has an empty key")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return path, value


def apply_overrides(data: Dict[str, Any], overrides: Sequence[str]) -> Dict[str, Any]:
    data = copy.deepcopy(data)
    for text in overrides or []:
        path, value = parse_override(text)
        node = data
        for part in path[:-1]:
            child = node.get(part)
            if child is None:
                child = node[part] = {}
            if not isinstance(child, dict):
                raise ConfigError(f"Override '{text}': '{part}' is not a section")
            node = child
        node[path[-1]] = value
    return data


def read_json(path: str) -> Dict[str, Any]:
    if not os.path.exists(path):
        raise ConfigError(f"Config file not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"Config file {path} is not valid JSON: {e}")


def load_config(path: Optional[str] = None, overrides: Sequence[str] = ()) -> ExperimentConfig:
    """
    Loads the shipped experiment defaults, merges a user config on top
    and applies dotted overrides.

    Args:
        path: user config file (JSON), or None for the defaults alone
        overrides: 'dotted.key=value' strings

    Returns:
        ExperimentConfig
    """
    data = read_json(Config.DEFAULT_EXPERIMENT)
    if path:
        data = deep_merge(data, read_json(path))
        logger.info(f"⚙️ Loaded config {path}")
    data = apply_overrides(data, overrides)
    return ExperimentConfig.from_dict(data)
