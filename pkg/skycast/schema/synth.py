"""
Skycast Schema - Synth
Parameters and latent ground truth of the synthetic sky generator.
"""
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd

from ..errors import ConfigError
from .site import GOLDEN, SiteConfig


@dataclass(frozen=True)
class SynthConfig:
    """
    Two-state (clear/cloudy) Markov sky with mean-reverting cloud cover.

    Transition rates are per-minute switching probabilities; mean run
    lengths are their reciprocals. Cover drives CSI through a piecewise
    linear map that is flat at 1.0 up to `clear_cover_max` and reaches
    `overcast_csi` at 100 %.
    """
    site: SiteConfig = GOLDEN
    n_days: int = 30
    seed: int = 0
    start: str = "2021-06-01"
    cadence_s: int = 60
    initial_regime: str = "clear"
    p_clear_to_cloudy: float = 1.0 / 240.0
    p_cloudy_to_clear: float = 1.0 / 120.0
    clear_cover_mean: float = 3.0
    cloudy_cover_mean: float = 65.0
    cover_theta: float = 0.05
    cover_sigma: float = 4.0
    clear_cover_max: float = 10.0
    overcast_csi: float = 0.2
    jitter_sigma: float = 0.08
    enhancement_cap: float = 0.2
    lead_minutes: int = 20
    coupling: float = 0.8
    disturbance_amplitude: float = 0.15
    disturbance_theta: float = 0.02
    dni_offset: float = 0.3
    cover_noise: float = 1.0
    outage_utc_hour: Optional[int] = None
    outage_minutes: int = 0

    def __post_init__(self):
        for name in ("p_clear_to_cloudy", "p_cloudy_to_clear", "coupling", "cover_theta", "disturbance_theta"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"SynthConfig.{name} must be in [0, 1], got {value}")
        if not 0.05 <= self.overcast_csi <= 0.3:
            raise ConfigError(f"overcast_csi must be in [0.05, 0.3], got {self.overcast_csi}")
        if self.initial_regime not in ("clear", "cloudy"):
            raise ConfigError(f"initial_regime must be 'clear' or 'cloudy', got {self.initial_regime}")
        if self.n_days < 1:
            raise ConfigError(f"n_days must be >= 1, got {self.n_days}")
        if not 0.0 <= self.dni_offset < 1.0:
            raise ConfigError(f"dni_offset must be in [0, 1), got {self.dni_offset}")
        if self.outage_utc_hour is not None and not 0 <= self.outage_utc_hour < 24:
            raise ConfigError(f"outage_utc_hour must be in [0, 24), got {self.outage_utc_hour}")

    def attenuation(self, cover: np.ndarray) -> np.ndarray:
        """Cover (%) -> CSI before jitter."""
        return np.interp(cover, [0.0, self.clear_cover_max, 100.0], [1.0, 1.0, self.overcast_csi])

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SynthConfig":
        data = dict(data)
        site = SiteConfig.from_dict(data.pop("site")) if "site" in data else GOLDEN
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"Unknown synth config keys: {sorted(unknown)}")
        return cls(site=site, **data)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["site"] = self.site.to_dict()
        return data


@dataclass
class SynthTruth:
    """Per-minute latent state behind a generated table."""
    timestamps: pd.DatetimeIndex
    regime: np.ndarray
    cover: np.ndarray
    effective_cover: np.ndarray
    disturbance: np.ndarray
    csi: np.ndarray
    config: SynthConfig = field(default_factory=SynthConfig)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "regime": self.regime.astype(np.int8),
            "cover": self.cover,
            "effective_cover": self.effective_cover,
            "disturbance": self.disturbance,
            "csi": self.csi,
        }, index=pd.Index(self.timestamps, name="timestamp"))
