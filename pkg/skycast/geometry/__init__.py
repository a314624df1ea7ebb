"""
Skycast Geometry Module
Solar position, sun events and clear-sky irradiance.
"""
from .solar import (
    solar_position,
    sun_events,
    clear_sky,
    solar_frame,
    augment,
    local_solar_date,
    CLEAR_SKY_COLUMNS,
)

__all__ = [
    "solar_position",
    "sun_events",
    "clear_sky",
    "solar_frame",
    "augment",
    "local_solar_date",
    "CLEAR_SKY_COLUMNS",
]
