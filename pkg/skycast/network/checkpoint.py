"""
Skycast Network - Checkpoint
Versioned .npz container: named parameter tensors plus a JSON header.
"""
import json
import logging
import os
import zipfile
from typing import Optional

import numpy as np

from .. import CHECKPOINT_FORMAT
from ..errors import CheckpointError
from ..schema.features import Normalization
from ..schema.network import NetworkConfig
from .model import Network, parameter_shapes

logger = logging.getLogger(__name__)

HEADER_KEY = "__header__"
ZIP_DATE_TIME = (1980, 1, 1, 0, 0, 0)


def save(net: Network, path: str) -> str:
    """
    Writes the network to `path`.

    The header carries the format version, config echo, master seed,
    feature names, target representation and the frozen scalers.
    """
    header = {
        "format": CHECKPOINT_FORMAT,
        "config": net.config.to_dict(),
        "seed": net.seed,
        "feature_names": list(net.feature_names),
        "representation": net.representation,
        "normalization": net.normalization.to_dict() if net.normalization else None,
        "target_scaler": net.target_scaler.to_dict() if net.target_scaler else None,
    }
    folder = os.path.dirname(path)
    if folder:
        os.makedirs(folder, exist_ok=True)
    encoded = np.frombuffer(json.dumps(header).encode("utf-8"), dtype=np.uint8)
    arrays = {HEADER_KEY: encoded, **{name: np.ascontiguousarray(p, dtype=np.float64) for name, p in net.params.items()}}
    with zipfile.ZipFile(path, "w", compression=zipfile.ZIP_STORED, allowZip64=True) as zf:
        for name, array in arrays.items():
            # fixed member timestamps keep equal networks byte-identical on disk
            info = zipfile.ZipInfo(f"{name}.npy", date_time=ZIP_DATE_TIME)
            with zf.open(info, "w", force_zip64=True) as f:
                np.lib.format.write_array(f, array, allow_pickle=False)
    logger.info(f"💾 Saved checkpoint {path} ({net.parameter_count} parameters)")
    return path


def load(path: str, expected: Optional[NetworkConfig] = None) -> Network:
    """
    Reads a checkpoint written by `save`.

    Args:
        path: checkpoint file
        expected: config the caller was built for; a different echo is rejected

    Raises:
        CheckpointError: unreadable, truncated, other version or other config
    """
    if not os.path.exists(path):
        raise CheckpointError(f"Checkpoint not found: {path}")
    try:
        with np.load(path, allow_pickle=False) as data:
            header = json.loads(bytes(data[HEADER_KEY]).decode("utf-8"))
            arrays = {name: data[name] for name in data.files if name != HEADER_KEY}
    except (zipfile.BadZipFile, ValueError, EOFError, KeyError, OSError) as e:
        raise CheckpointError(f"Checkpoint {path} is unreadable: {e}")

    found = header.get("format")
    if found != CHECKPOINT_FORMAT:
        raise CheckpointError(f"Checkpoint format {found} is not supported, expected {CHECKPOINT_FORMAT}")
    config = NetworkConfig.from_dict(header["config"])
    if expected is not None and expected != config:
        raise CheckpointError(
            f"Checkpoint config {config.to_dict()} does not match the expected config {expected.to_dict()}"
        )

    shapes = parameter_shapes(config)
    if set(arrays) != set(shapes):
        raise CheckpointError(f"Checkpoint tensors {sorted(arrays)} do not match {sorted(shapes)}")
    for name, shape in shapes.items():
        if arrays[name].shape != shape:
            raise CheckpointError(f"Tensor {name} has shape {arrays[name].shape}, expected {shape}")

    norm = header.get("normalization")
    scaler = header.get("target_scaler")
    net = Network(
        config=config,
        params={name: np.array(arrays[name], dtype=np.float64) for name in shapes},
        seed=int(header.get("seed", 0)),
        feature_names=list(header.get("feature_names", [])),
        representation=header.get("representation"),
        normalization=Normalization.from_dict(norm) if norm else None,
        target_scaler=Normalization.from_dict(scaler) if scaler else None,
    )
    logger.info(f"📂 Loaded checkpoint {path}: {net}")
    return net
