"""
Skycast Forecast - Targets
Encoding future GHI into a target representation and decoding predictions back.

All functions broadcast: a DecodeContext of scalars and 12-vectors, or
batched arrays of shape (N,) for ghi_0/csi_0 and (N, H) for clear-sky GHI.
"""
import logging
from typing import Tuple

import numpy as np

from ..errors import DataError
from ..schema.series import WindowArrays
from ..schema.targets import DecodeContext, TargetRepresentation

logger = logging.getLogger(__name__)


class WindowRejected(DataError):
    """Clear-sky GHI is not positive at some horizon."""


class ClampCounter:
    """Counts decoded values floored at zero."""

    def __init__(self):
        self.clamped = 0
        self.total = 0

    def clamp(self, values: np.ndarray) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        negative = values < 0
        self.clamped += int(negative.sum())
        self.total += int(values.size)
        return np.where(negative, 0.0, values)

    @property
    def fraction(self) -> float:
        return self.clamped / self.total if self.total else 0.0

    def __repr__(self) -> str:
        return f"ClampCounter(clamped={self.clamped}, total={self.total})"


def _columns(ghi_0, csi_0, ghi_cs) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    ghi_cs = np.asarray(ghi_cs, dtype=float)
    ghi_0 = np.asarray(ghi_0, dtype=float)
    csi_0 = np.asarray(csi_0, dtype=float)
    if ghi_cs.ndim == 2:
        ghi_0, csi_0 = ghi_0[:, None], csi_0[:, None]
    return ghi_0, csi_0, ghi_cs


def encode_array(kind, ghi_future, ghi_0, csi_0, ghi_cs) -> np.ndarray:
    kind = TargetRepresentation.parse(kind)
    ghi = np.asarray(ghi_future, dtype=float)
    ghi_0, csi_0, ghi_cs = _columns(ghi_0, csi_0, ghi_cs)
    bad = ~(ghi_cs > 0)
    if bad.any():
        raise WindowRejected(f"Clear-sky GHI is not positive at {int(bad.sum())} horizon(s); window rejected")
    if kind == TargetRepresentation.GHI:
        return ghi.copy()
    if kind == TargetRepresentation.CSI:
        return ghi / ghi_cs
    if kind == TargetRepresentation.CS_DEV:
        return ghi_cs - ghi
    if kind == TargetRepresentation.DELTA_GHI:
        return ghi - ghi_0
    return ghi / ghi_cs - csi_0


def decode_array(kind, prediction, ghi_0, csi_0, ghi_cs, counter: ClampCounter = None) -> np.ndarray:
    kind = TargetRepresentation.parse(kind)
    pred = np.asarray(prediction, dtype=float)
    ghi_0, csi_0, ghi_cs = _columns(ghi_0, csi_0, ghi_cs)
    if kind == TargetRepresentation.GHI:
        ghi = pred.copy()
    elif kind == TargetRepresentation.CSI:
        ghi = pred * ghi_cs
    elif kind == TargetRepresentation.CS_DEV:
        ghi = ghi_cs - pred
    elif kind == TargetRepresentation.DELTA_GHI:
        ghi = pred + ghi_0
    else:
        ghi = (pred + csi_0) * ghi_cs
    counter = counter if counter is not None else ClampCounter()
    return counter.clamp(ghi)


def encode_target(kind, ghi_future, ctx: DecodeContext) -> np.ndarray:
    """
    Target values for one window.

    GHI: identity, CSI: ghi/ghi_cs, CS_DEV: ghi_cs - ghi,
    DELTA_GHI: ghi - ghi_0, DELTA_CSI: ghi/ghi_cs - csi_0.

    The CSI target is the raw ratio ghi/ghi_cs, not the guarded
    `clear_sky_index` feature (zeroed below eps and clamped). Windows whose
    clear-sky horizons are not positive are rejected instead, so
    `decode_to_ghi` inverts every accepted target exactly.
    """
    return encode_array(kind, ghi_future, ctx.ghi_0, ctx.csi_0, ctx.ghi_cs_horizons)


def decode_to_ghi(kind, prediction, ctx: DecodeContext, counter: ClampCounter = None) -> np.ndarray:
    """Inverse of encode_target, floored at 0 W/m2 (floored entries are counted)."""
    return decode_array(kind, prediction, ctx.ghi_0, ctx.csi_0, ctx.ghi_cs_horizons, counter)


def encode_windows(kind, arrays: WindowArrays) -> np.ndarray:
    return encode_array(kind, arrays.target_ghi, arrays.ghi_0, arrays.csi_0, arrays.ghi_cs)


def decode_windows(kind, prediction: np.ndarray, arrays: WindowArrays, counter: ClampCounter = None) -> np.ndarray:
    return decode_array(kind, prediction, arrays.ghi_0, arrays.csi_0, arrays.ghi_cs, counter)


def target_distribution(kind, arrays: WindowArrays, bins: int = 50, value_range=None):
    """
    Probability density of the encoded targets over all windows and horizons.

    Returns:
        (density, bin_edges) as from numpy.histogram with density=True
    """
    values = encode_windows(kind, arrays).ravel()
    if values.size == 0:
        raise DataError("No windows to build a target distribution from")
    return np.histogram(values, bins=bins, range=value_range, density=True)
