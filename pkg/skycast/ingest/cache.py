"""
Skycast Ingest - Window Cache
Parquet snapshot of a WindowSet with its schema hash in the file metadata.
"""
import json
import logging
import os
from typing import Optional

import numpy as np
import pandas as pd
import pyarrow as pa
import pyarrow.parquet as pq

from .. import WINDOW_CACHE_FORMAT
from ..errors import DataError
from ..schema.series import Window, WindowSet
from ..schema.targets import DecodeContext

logger = logging.getLogger(__name__)

METADATA_KEY = b"skycast"


def _frame(ws: WindowSet) -> pd.DataFrame:
    arrays = ws.arrays()
    n, t, f, h = len(ws), ws.input_len, len(ws.feature_names), len(ws.horizon_offsets)
    data = {"t0": arrays.t0}
    flat = arrays.inputs.reshape(n, t * f)
    for k in range(t * f):
        data[f"x{k // f}_{ws.feature_names[k % f]}"] = flat[:, k]
    for k in range(h):
        data[f"target_{k}"] = arrays.target_ghi[:, k]
    for k in range(h):
        data[f"ghi_cs_{k}"] = arrays.ghi_cs[:, k]
    data["ghi_0"] = arrays.ghi_0
    data["csi_0"] = arrays.csi_0
    data["cloud_cover"] = arrays.cloud_cover
    return pd.DataFrame(data)


def save_window_cache(ws: WindowSet, path: str) -> str:
    """Writes the window set as one parquet row per window."""
    table = pa.Table.from_pandas(_frame(ws), preserve_index=False)
    header = {
        "format": WINDOW_CACHE_FORMAT,
        "schema_hash": ws.schema_hash(),
        "input_len": ws.input_len,
        "input_spacing_s": ws.input_spacing_s,
        "horizon_offsets": list(ws.horizon_offsets),
        "feature_names": list(ws.feature_names),
    }
    metadata = dict(table.schema.metadata or {})
    metadata[METADATA_KEY] = json.dumps(header).encode("utf-8")
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    pq.write_table(table.replace_schema_metadata(metadata), path)
    logger.info(f"✅ Cached {len(ws)} windows to {path}")
    return path


def load_window_cache(path: str, expected_hash: Optional[str] = None) -> WindowSet:
    """
    Reads a cache written by save_window_cache.

    Raises:
        DataError: unreadable file, foreign format or schema hash mismatch
    """
    try:
        table = pq.read_table(path)
    except (OSError, pa.ArrowInvalid) as e:
        raise DataError(f"Cannot read window cache {path}: {e}")

    raw = (table.schema.metadata or {}).get(METADATA_KEY)
    if raw is None:
        raise DataError(f"{path} is not a skycast window cache")
    header = json.loads(raw.decode("utf-8"))
    if header.get("format") != WINDOW_CACHE_FORMAT:
        raise DataError(f"{path}: cache format {header.get('format')} != {WINDOW_CACHE_FORMAT}")
    if expected_hash is not None and header["schema_hash"] != expected_hash:
        raise DataError(f"{path}: schema hash {header['schema_hash'][:12]} does not match expected {expected_hash[:12]}")

    frame = table.to_pandas()
    names = header["feature_names"]
    t, f, h = header["input_len"], len(names), len(header["horizon_offsets"])
    n = len(frame)
    x_cols = [f"x{k // f}_{names[k % f]}" for k in range(t * f)]
    inputs = frame[x_cols].to_numpy(dtype=float).reshape(n, t, f) if x_cols else np.zeros((n, t, 0))
    targets = frame[[f"target_{k}" for k in range(h)]].to_numpy(dtype=float)
    cs = frame[[f"ghi_cs_{k}" for k in range(h)]].to_numpy(dtype=float)
    t0 = pd.DatetimeIndex(frame["t0"])
    t0 = t0.tz_localize("UTC") if t0.tz is None else t0.tz_convert("UTC")

    windows = []
    for i in range(n):
        cover = frame["cloud_cover"].iloc[i]
        windows.append(Window(
            t0=t0[i],
            inputs=inputs[i],
            target=targets[i],
            context=DecodeContext(float(frame["ghi_0"].iloc[i]), float(frame["csi_0"].iloc[i]), cs[i]),
            cloud_cover_pct=None if pd.isna(cover) else float(cover),
        ))
    ws = WindowSet(windows, t, header["input_spacing_s"], header["horizon_offsets"], names)
    if ws.schema_hash() != header["schema_hash"]:
        raise DataError(f"{path}: stored schema hash does not match its own header")
    return ws
