"""
Skycast Experiments - Importance
Permutation feature importance on validation windows.
"""
import logging
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from ..config import ExperimentConfig
from ..errors import ConfigError
from ..evaluation.metrics import mae
from ..network.model import Network
from ..schema.experiments import ImportanceEntry, ImportanceReport
from ..schema.series import WindowArrays
from .pipeline import forecast_arrays

logger = logging.getLogger(__name__)


def permutation_importance(net: Network, arrays: WindowArrays, config: ExperimentConfig,
                           features: Optional[Sequence[str]] = None, repetitions: int = 5,
                           seed: int = 0) -> ImportanceReport:
    """
    ΔMAE per feature when its column is shuffled across validation windows.

    The same permutation is applied at every time step of the input block.
    Each (feature, repetition) pair has its own seeded permutation; the
    network is only read.

    Args:
        net: trained network with normalization and representation attached
        arrays: validation windows (raw, unnormalized inputs)
        config: experiment config (noise mode, clamp rules)
        features: subset of the network inputs, default all
        repetitions: permutations per feature
        seed: base seed

    Returns:
        ImportanceReport with baseline MAE and mean/std ΔMAE per feature
    """
    if repetitions < 1:
        raise ConfigError(f"repetitions must be >= 1, got {repetitions}")
    names = list(net.feature_names)
    features = list(features) if features is not None else names
    unknown = [f for f in features if f not in names]
    if unknown:
        raise ConfigError(f"Features {unknown} are not network inputs {names}")
    if len(arrays) < 2:
        raise ConfigError("Permutation importance needs at least two validation windows")

    baseline = mae(arrays.target_ghi, forecast_arrays(net, arrays, config))
    logger.info(f"🔀 Baseline MAE {baseline:.3f} W/m² over {len(arrays)} windows; permuting {len(features)} features x{repetitions}")

    entries = []
    for feature in features:
        j = names.index(feature)
        deltas = []
        for r in range(repetitions):
            rng = np.random.default_rng([seed, j, r])
            perm = rng.permutation(len(arrays))
            corrupted = arrays.inputs.copy()
            corrupted[:, :, j] = arrays.inputs[perm][:, :, j]
            shuffled = WindowArrays(arrays.t0, corrupted, arrays.target_ghi, arrays.ghi_0,
                                    arrays.csi_0, arrays.ghi_cs, arrays.cloud_cover)
            deltas.append(mae(arrays.target_ghi, forecast_arrays(net, shuffled, config)) - baseline)
        entries.append(ImportanceEntry(feature, float(np.mean(deltas)), float(np.std(deltas)), [float(d) for d in deltas]))

    report = ImportanceReport(baseline, repetitions, entries, seed)
    top = ", ".join(f"{e.feature} ({e.delta_mean:.2f})" for e in report.ranked()[:3])
    logger.info(f"✅ Importance done, top: {top}")
    return report


def importance_histogram(report: ImportanceReport, bins: int = 20) -> pd.DataFrame:
    """Binned distribution of mean ΔMAE across features."""
    values = np.array([e.delta_mean for e in report.entries])
    if values.size == 0:
        return pd.DataFrame(columns=["bin_lo", "bin_hi", "count"])
    counts, edges = np.histogram(values, bins=bins)
    return pd.DataFrame({"bin_lo": edges[:-1], "bin_hi": edges[1:], "count": counts})
