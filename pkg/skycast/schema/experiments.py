"""
Skycast Schema - Experiments
Rolling split plans, sweep results and permutation importance reports.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import math

import pandas as pd


@dataclass
class SplitStep:
    """One train/validate pair of the rolling protocol; ranges are half-open [start, end)."""
    name: str
    train_range: Tuple[pd.Timestamp, pd.Timestamp]
    validate_range: Tuple[pd.Timestamp, pd.Timestamp]
    description: str = ""
    train_count: Optional[int] = None
    validate_count: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "train_range": [self.train_range[0].isoformat(), self.train_range[1].isoformat()],
            "validate_range": [self.validate_range[0].isoformat(), self.validate_range[1].isoformat()],
            "description": self.description,
            "train_count": self.train_count,
            "validate_count": self.validate_count,
        }


@dataclass
class SplitPlan:
    steps: List[SplitStep] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def __getitem__(self, i) -> SplitStep:
        return self.steps[i]

    @property
    def counts(self) -> List[Dict[str, Optional[int]]]:
        return [{"step": s.name, "train": s.train_count, "validate": s.validate_count} for s in self.steps]

    def to_dict(self) -> Dict[str, Any]:
        return {"steps": [s.to_dict() for s in self.steps]}


@dataclass
class SweepResult:
    """
    One trained cell of a sweep.

    `axis` is "representation", "sequence_length", "feature" or "ablation";
    `label` is the cell's coordinate on that axis. A failed cell carries
    `status="failed"`, the error text and a NaN MAE.
    """
    axis: str
    label: str
    val_mae: float
    seed: int
    config_hash: str
    status: str = "ok"
    error: str = ""
    step: str = ""
    params: Dict[str, Any] = field(default_factory=dict)
    per_horizon_fss: List[float] = field(default_factory=list)
    poc_mae: float = math.nan
    epochs: int = 0

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "axis": self.axis,
            "label": self.label,
            "val_mae": self.val_mae,
            "poc_mae": self.poc_mae,
            "seed": self.seed,
            "config_hash": self.config_hash,
            "status": self.status,
            "error": self.error,
            "step": self.step,
            "params": self.params,
            "per_horizon_fss": list(self.per_horizon_fss),
            "epochs": self.epochs,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SweepResult":
        return cls(
            axis=data["axis"],
            label=data["label"],
            val_mae=float(data["val_mae"]) if data.get("val_mae") is not None else math.nan,
            poc_mae=float(data["poc_mae"]) if data.get("poc_mae") is not None else math.nan,
            seed=int(data["seed"]),
            config_hash=data["config_hash"],
            status=data.get("status", "ok"),
            error=data.get("error", ""),
            step=data.get("step", ""),
            params=data.get("params", {}),
            per_horizon_fss=list(data.get("per_horizon_fss", [])),
            epochs=int(data.get("epochs", 0)),
        )


@dataclass
class ImportanceEntry:
    feature: str
    delta_mean: float
    delta_std: float
    deltas: List[float] = field(default_factory=list)


@dataclass
class ImportanceReport:
    baseline_mae: float
    repetitions: int
    entries: List[ImportanceEntry] = field(default_factory=list)
    seed: int = 0

    def ranked(self) -> List[ImportanceEntry]:
        return sorted(self.entries, key=lambda e: e.delta_mean, reverse=True)

    def top(self, n: int) -> List[str]:
        return [e.feature for e in self.ranked()[:n]]

    def delta(self, feature: str) -> float:
        for entry in self.entries:
            if entry.feature == feature:
                return entry.delta_mean
        raise KeyError(feature)

    def to_frame(self) -> pd.DataFrame:
        ranked = self.ranked()
        return pd.DataFrame({
            "rank": range(1, len(ranked) + 1),
            "feature": [e.feature for e in ranked],
            "delta_mae": [e.delta_mean for e in ranked],
            "delta_mae_std": [e.delta_std for e in ranked],
        })

    def to_dict(self) -> Dict[str, Any]:
        return {
            "baseline_mae": self.baseline_mae,
            "repetitions": self.repetitions,
            "seed": self.seed,
            "entries": [
                {"feature": e.feature, "delta_mae": e.delta_mean, "delta_mae_std": e.delta_std, "deltas": e.deltas}
                for e in self.ranked()
            ],
        }
