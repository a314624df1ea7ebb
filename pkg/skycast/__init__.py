"""
Skycast
Data-parsimonious short-term solar irradiance forecasting from scalar
station and sky-camera features.
"""
__version__ = "1.0.0"

CHECKPOINT_FORMAT = "skycast-checkpoint/1"
WINDOW_CACHE_FORMAT = "skycast-windows/1"
