"""
Skycast Schema - Site
Site description and solar geometry value types.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

import pandas as pd

from ..errors import ConfigError


@dataclass(frozen=True)
class SiteConfig:
    """
    Measurement site.

    `turbidity` in a config file may be a scalar or twelve monthly values;
    the monthly form lands in `monthly_turbidity`.
    """
    latitude: float
    longitude: float
    elevation_m: float = 0.0
    default_turbidity: float = 3.0
    monthly_turbidity: Optional[Tuple[float, ...]] = None
    eclipse_shading: float = 1.0
    name: str = ""

    def __post_init__(self):
        if not -90.0 <= self.latitude <= 90.0:
            raise ConfigError(f"latitude must be in [-90, 90], got {self.latitude}")
        if not -180.0 <= self.longitude <= 180.0:
            raise ConfigError(f"longitude must be in [-180, 180], got {self.longitude}")
        if self.default_turbidity < 1.0:
            raise ConfigError(f"turbidity must be >= 1, got {self.default_turbidity}")
        if self.monthly_turbidity is not None:
            monthly = tuple(float(v) for v in self.monthly_turbidity)
            if len(monthly) != 12:
                raise ConfigError(f"monthly turbidity needs 12 values, got {len(monthly)}")
            if min(monthly) < 1.0:
                raise ConfigError(f"monthly turbidity values must be >= 1, got {monthly}")
            object.__setattr__(self, "monthly_turbidity", monthly)

    def turbidity_for(self, month: int) -> float:
        if self.monthly_turbidity is None:
            return self.default_turbidity
        return self.monthly_turbidity[month - 1]

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SiteConfig":
        turbidity = data.get("turbidity", data.get("default_turbidity", 3.0))
        monthly = data.get("monthly_turbidity")
        if isinstance(turbidity, (list, tuple)):
            monthly, turbidity = turbidity, 3.0
        try:
            return cls(
                latitude=float(data["latitude"]),
                longitude=float(data["longitude"]),
                elevation_m=float(data.get("elevation_m", 0.0)),
                default_turbidity=float(turbidity),
                monthly_turbidity=tuple(monthly) if monthly is not None else None,
                eclipse_shading=float(data.get("eclipse_shading", 1.0)),
                name=data.get("name", ""),
            )
        except KeyError as e:
            raise ConfigError(f"site block is missing {e}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "latitude": self.latitude,
            "longitude": self.longitude,
            "elevation_m": self.elevation_m,
            "turbidity": list(self.monthly_turbidity) if self.monthly_turbidity else self.default_turbidity,
            "eclipse_shading": self.eclipse_shading,
        }


# NREL Solar Radiation Research Laboratory, Golden CO
GOLDEN = SiteConfig(latitude=39.742, longitude=-105.18, elevation_m=1828.8, name="NREL SRRL")


@dataclass(frozen=True)
class SolarPosition:
    zenith: float
    elevation: float
    azimuth: float

    @property
    def is_up(self) -> bool:
        return self.zenith < 90.0


@dataclass(frozen=True)
class SunEvents:
    """
    Sunrise, solar noon and sunset for one local solar date.

    `polar` is "day" or "night" when the sun does not cross the horizon;
    sunrise and sunset are then None.
    """
    date: Any
    sunrise: Optional[pd.Timestamp]
    solar_noon: pd.Timestamp
    sunset: Optional[pd.Timestamp]
    polar: Optional[str] = None

    @property
    def rises(self) -> bool:
        return self.polar is None

    @property
    def daylight_hours(self) -> float:
        if self.polar == "day":
            return 24.0
        if self.polar == "night":
            return 0.0
        return (self.sunset - self.sunrise).total_seconds() / 3600.0


@dataclass(frozen=True)
class ClearSkyIrradiance:
    ghi_cs: float = 0.0
    dni_cs: float = 0.0
    dhi_cs: float = 0.0

    def to_dict(self) -> Dict[str, float]:
        return {"ghi_cs": self.ghi_cs, "dni_cs": self.dni_cs, "dhi_cs": self.dhi_cs}
