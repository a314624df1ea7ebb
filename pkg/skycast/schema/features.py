"""
Skycast Schema - Features
Declarative feature specs, assembled feature matrices and their normalization.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from ..errors import ConfigError


class TransformKind(str, Enum):
    RAW = "raw"
    TOD = "tod"
    TOY = "toy"
    TM = "tm"
    CYCLIC = "cyclic"
    CSI = "csi"
    CS_DEV = "cs_dev"
    LAG = "lag"
    ROLL_MEAN = "roll_mean"
    ROLL_MEDIAN = "roll_median"
    ROLL_STD = "roll_std"
    WIND_COMPONENTS = "wind_components"
    FLAG = "flag"
    COS_ZENITH = "cos_zenith"
    CNI = "cni"
    SUN_POSITION = "sun_position"


ROLLING_KINDS = (TransformKind.ROLL_MEAN, TransformKind.ROLL_MEDIAN, TransformKind.ROLL_STD)

# Kinds computed from the timestamp (and site) alone.
TIME_KINDS = (TransformKind.TOD, TransformKind.TOY, TransformKind.TM, TransformKind.FLAG)


@dataclass
class FeatureSpec:
    """
    One named column of the model input.

    Args:
        name: unique output column name
        inputs: table or spec columns the transform reads
        transform: kind of transform
        params: kind-specific scalars (k, w, period, event, axis, ...)
        group: manifest grouping (bms, camera, clear_sky, engineered, time)
    """
    name: str
    inputs: List[str] = field(default_factory=list)
    transform: TransformKind = TransformKind.RAW
    params: Dict[str, Any] = field(default_factory=dict)
    group: str = ""

    def __post_init__(self):
        self.transform = TransformKind(self.transform)
        kind = self.transform
        if kind == TransformKind.LAG and int(self.params.get("k", 0)) < 1:
            raise ConfigError(f"Feature '{self.name}': lag k must be >= 1, got {self.params.get('k')}")
        if kind in ROLLING_KINDS and int(self.params.get("w", 0)) < 2:
            raise ConfigError(f"Feature '{self.name}': rolling window w must be >= 2, got {self.params.get('w')}")
        if kind == TransformKind.CYCLIC and float(self.params.get("period", 1.0)) <= 0:
            raise ConfigError(f"Feature '{self.name}': period must be > 0")
        if kind == TransformKind.RAW and not self.inputs:
            self.inputs = [self.name]

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FeatureSpec":
        try:
            return cls(
                name=data["name"],
                inputs=list(data.get("inputs", [])),
                transform=data.get("transform", "raw"),
                params=dict(data.get("params", {})),
                group=data.get("group", ""),
            )
        except KeyError as e:
            raise ConfigError(f"Feature spec is missing {e}: {data}")
        except ValueError as e:
            raise ConfigError(f"Invalid feature spec {data.get('name')}: {e}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "inputs": list(self.inputs),
            "transform": self.transform.value,
            "params": dict(self.params),
            "group": self.group,
        }


@dataclass
class Normalization:
    """Per-feature z-score statistics frozen from the training rows."""
    feature_names: List[str]
    mean: np.ndarray
    scale: np.ndarray

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=float)
        self.scale = np.asarray(self.scale, dtype=float)

    @classmethod
    def fit(cls, feature_names: List[str], rows: np.ndarray) -> "Normalization":
        """Statistics over the leading axes of `rows` (..., F). A zero scale becomes 1."""
        rows = np.asarray(rows, dtype=float).reshape(-1, len(feature_names))
        if len(rows) == 0:
            return cls.identity(feature_names)
        mean = rows.mean(axis=0)
        scale = rows.std(axis=0)
        scale = np.where(scale > 0, scale, 1.0)
        return cls(list(feature_names), mean, scale)

    @classmethod
    def identity(cls, feature_names: List[str]) -> "Normalization":
        n = len(feature_names)
        return cls(list(feature_names), np.zeros(n), np.ones(n))

    def apply(self, values: np.ndarray) -> np.ndarray:
        return (np.asarray(values, dtype=float) - self.mean) / self.scale

    def restore(self, values: np.ndarray) -> np.ndarray:
        return np.asarray(values, dtype=float) * self.scale + self.mean

    def to_dict(self) -> Dict[str, Any]:
        return {"feature_names": list(self.feature_names), "mean": self.mean.tolist(), "scale": self.scale.tolist()}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Normalization":
        return cls(list(data["feature_names"]), np.asarray(data["mean"]), np.asarray(data["scale"]))


@dataclass
class FeatureMatrix:
    """N x F block of complete rows with the normalization that produced it."""
    feature_names: List[str]
    rows: np.ndarray
    normalization: Normalization
    timestamps: Optional[pd.DatetimeIndex] = None
    excluded_rows: int = 0

    @property
    def shape(self):
        return self.rows.shape
