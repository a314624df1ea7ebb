"""
Skycast Schema - Targets
Target representations and the context needed to decode them back to GHI.
"""
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ..errors import ConfigError


class TargetRepresentation(str, Enum):
    """What the network predicts for each horizon."""
    GHI = "GHI"
    CSI = "CSI"
    CS_DEV = "CS_DEV"
    DELTA_GHI = "DELTA_GHI"
    DELTA_CSI = "DELTA_CSI"

    @classmethod
    def parse(cls, value) -> "TargetRepresentation":
        if isinstance(value, cls):
            return value
        key = str(value).strip().upper().replace("-", "_").replace(" ", "_")
        aliases = {"DCSI": "DELTA_CSI", "DGHI": "DELTA_GHI", "CSDEV": "CS_DEV"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            names = [k.value for k in cls]
            raise ConfigError(f"Unknown target_representation '{value}', expected one of {names}")


@dataclass
class DecodeContext:
    """Conditions at forecast time: GHI_0, CSI_0 and the clear-sky GHI at every horizon."""
    ghi_0: float
    csi_0: float
    ghi_cs_horizons: np.ndarray

    def __post_init__(self):
        self.ghi_cs_horizons = np.asarray(self.ghi_cs_horizons, dtype=float)

    @property
    def horizons(self) -> int:
        return len(self.ghi_cs_horizons)

    def to_dict(self):
        return {
            "ghi_0": self.ghi_0,
            "csi_0": self.csi_0,
            "ghi_cs_horizons": self.ghi_cs_horizons.tolist(),
        }
