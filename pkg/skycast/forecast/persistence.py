"""
Skycast Forecast - Persistence
Persistence-of-cloudiness baseline: CSI held at its forecast-time value.
"""
import numpy as np

from ..features.transforms import CSI_CEILING, CSI_EPS, clear_sky_index
from ..schema.series import WindowArrays
from ..schema.targets import DecodeContext


def context_from(ghi_0: float, ghi_cs_0: float, ghi_cs_horizons, eps: float = CSI_EPS,
                 ceiling: float = CSI_CEILING) -> DecodeContext:
    """DecodeContext with CSI_0 from the guarded clear-sky index."""
    return DecodeContext(float(ghi_0), float(clear_sky_index(ghi_0, ghi_cs_0, eps, ceiling)),
                         np.asarray(ghi_cs_horizons, dtype=float))


def poc_forecast(ctx: DecodeContext) -> np.ndarray:
    """GHI at each horizon = CSI_0 * clear-sky GHI at that horizon."""
    return ctx.csi_0 * np.asarray(ctx.ghi_cs_horizons, dtype=float)


def poc_windows(arrays: WindowArrays) -> np.ndarray:
    return arrays.csi_0[:, None] * arrays.ghi_cs
