"""
Skycast Forecast Module
Target representations and the persistence-of-cloudiness baseline.
"""
from .targets import (
    ClampCounter,
    WindowRejected,
    encode_target,
    decode_to_ghi,
    encode_array,
    decode_array,
    encode_windows,
    decode_windows,
    target_distribution,
)
from .persistence import context_from, poc_forecast, poc_windows

__all__ = [
    "ClampCounter",
    "WindowRejected",
    "encode_target",
    "decode_to_ghi",
    "encode_array",
    "decode_array",
    "encode_windows",
    "decode_windows",
    "target_distribution",
    "context_from",
    "poc_forecast",
    "poc_windows",
]
