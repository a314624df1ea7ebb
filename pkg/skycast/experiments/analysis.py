"""
Skycast Experiments - Analysis
Rank autocorrelation of the irradiance representations.
"""
from typing import Iterable

import numpy as np
import pandas as pd

from ..config import ExperimentConfig
from ..errors import ConfigError
from ..evaluation.metrics import autocorrelation_profile
from ..features.transforms import clear_sky_deviation, clear_sky_index
from ..geometry.solar import augment
from ..schema.series import TimeSeriesTable

DEFAULT_LAGS = range(-12, 13)


def representation_autocorrelation(table: TimeSeriesTable, config: ExperimentConfig,
                                   lags: Iterable[int] = DEFAULT_LAGS) -> pd.DataFrame:
    """
    Per-lag Spearman autocorrelation of GHI, CSI and clear-sky deviation
    sampled at the input spacing. Rows with clear-sky GHI below the
    daylight threshold are treated as missing.

    Returns:
        DataFrame indexed by lag with columns GHI, CSI, CS_DEV
    """
    spacing = config.windows.spacing_s
    if spacing % table.cadence_s:
        raise ConfigError(f"spacing_s={spacing} is not a multiple of the cadence {table.cadence_s} s")
    if "ghi_cs" not in table:
        table = augment(table, config.site)
    step = spacing // table.cadence_s
    ghi = table.column("ghi")[::step]
    ghi_cs = table.column("ghi_cs")[::step]
    threshold = config.windows.daylight_min_ghi_cs or 0.0
    dark = ~(ghi_cs > threshold)

    series = {
        "GHI": ghi,
        "CSI": clear_sky_index(ghi, ghi_cs, config.features.csi_eps, config.features.csi_ceiling),
        "CS_DEV": clear_sky_deviation(ghi, ghi_cs),
    }
    lags = list(lags)
    columns = {}
    for name, values in series.items():
        values = np.where(dark, np.nan, values)
        profile = autocorrelation_profile(values, lags)
        columns[name] = [profile[k] for k in lags]
    return pd.DataFrame(columns, index=pd.Index(lags, name="lag"))
