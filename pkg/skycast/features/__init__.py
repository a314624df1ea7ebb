"""
Skycast Features Module
Time representations, column transforms and feature assembly.
"""
from .time_features import time_of_day, time_of_year, time_milestones, cyclic_encode
from .transforms import (
    clear_sky_index,
    clear_sky_deviation,
    lagged,
    rolling_stat,
    wind_components,
    sun_position_components,
    CSI_EPS,
    CSI_CEILING,
)
from .assembler import (
    FeatureOptions,
    assemble,
    engineer,
    dependency_order,
    load_manifest,
    time_representation_specs,
    with_time_representation,
    TIME_REPRESENTATIONS,
)

__all__ = [
    "time_of_day",
    "time_of_year",
    "time_milestones",
    "cyclic_encode",
    "clear_sky_index",
    "clear_sky_deviation",
    "lagged",
    "rolling_stat",
    "wind_components",
    "sun_position_components",
    "CSI_EPS",
    "CSI_CEILING",
    "FeatureOptions",
    "assemble",
    "engineer",
    "dependency_order",
    "load_manifest",
    "time_representation_specs",
    "with_time_representation",
    "TIME_REPRESENTATIONS",
]
