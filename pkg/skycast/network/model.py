"""
Skycast Network - Model
Dropout -> Conv1D -> LSTM -> Dense -> Dense with a Gaussian noise input channel.
"""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..errors import ConfigError, DataError
from ..schema.features import Normalization
from ..schema.network import NetworkConfig
from . import layers
from .noise import NoiseChannel

logger = logging.getLogger(__name__)

INIT_STREAM = 0
DROPOUT_STREAM = 2


@dataclass
class Network:
    """
    Parameter tensors plus the metadata a checkpoint must carry.

    `target_scaler` maps encoded targets to the space the output layer
    is trained in; `normalization` holds the frozen input statistics.
    """
    config: NetworkConfig
    params: Dict[str, np.ndarray]
    seed: int = 0
    feature_names: List[str] = field(default_factory=list)
    representation: Optional[str] = None
    normalization: Optional[Normalization] = None
    target_scaler: Optional[Normalization] = None

    def __post_init__(self):
        self.dropout_rng = np.random.default_rng([self.seed, DROPOUT_STREAM])

    @property
    def parameter_count(self) -> int:
        return int(sum(p.size for p in self.params.values()))

    def copy_params(self) -> Dict[str, np.ndarray]:
        return {name: p.copy() for name, p in self.params.items()}

    def set_params(self, params: Dict[str, np.ndarray]):
        for name, value in params.items():
            self.params[name] = value.copy()

    def all_finite(self) -> bool:
        return all(np.isfinite(p).all() for p in self.params.values())

    def __repr__(self) -> str:
        return (f"Network(F={self.config.input_features}, T={self.config.seq_len}, "
                f"noise={self.config.noise_width}, params={self.parameter_count})")


def parameter_shapes(config: NetworkConfig) -> Dict[str, Tuple[int, ...]]:
    """Named tensor shapes in a fixed order; conv_noise_w only when the noise channel is on."""
    k, F, n = config.kernel_eff, config.input_features, config.noise_width
    C, H, D, O = config.conv_filters, config.lstm_hidden, config.dense_hidden, config.output_len
    shapes = {"conv_w": (k, F, C)}
    if n > 0:
        shapes["conv_noise_w"] = (k, n, C)
    shapes.update({
        "conv_b": (C,),
        "lstm_W": (C, 4 * H),
        "lstm_U": (H, 4 * H),
        "lstm_b": (4 * H,),
        "dense1_w": (H, D),
        "dense1_b": (D,),
        "dense2_w": (D, O),
        "dense2_b": (O,),
    })
    return shapes


def parameter_count(config: NetworkConfig) -> int:
    return int(sum(np.prod(s) for s in parameter_shapes(config).values()))


def _fan_in(name: str, config: NetworkConfig) -> int:
    if name.startswith("conv"):
        return config.kernel_eff * (config.input_features + config.noise_width)
    if name in ("lstm_W",):
        return config.conv_filters
    if name.startswith("lstm"):
        return config.lstm_hidden
    if name.startswith("dense1"):
        return config.lstm_hidden
    return config.dense_hidden


def init_network(config: NetworkConfig, seed: Optional[int] = None) -> Network:
    """
    Seeded uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialization.

    The LSTM forget-gate bias starts at 1. Equal seeds give bit-identical
    parameters.
    """
    seed = config.seed if seed is None else int(seed)
    rng = np.random.default_rng([seed, INIT_STREAM])
    params = {}
    for name, shape in parameter_shapes(config).items():
        bound = 1.0 / np.sqrt(_fan_in(name, config))
        params[name] = rng.uniform(-bound, bound, size=shape)
    H = config.lstm_hidden
    params["lstm_b"][H:2 * H] += 1.0
    net = Network(config, params, seed=seed)
    logger.debug(f"🧠 Initialized {net}")
    return net


def _check_inputs(net: Network, inputs: np.ndarray) -> np.ndarray:
    x = np.asarray(inputs, dtype=float)
    if x.ndim == 2:
        x = x[None]
    expected = (net.config.seq_len, net.config.input_features)
    if x.ndim != 3 or x.shape[1:] != expected:
        raise DataError(f"Input block shape {x.shape} does not match (B, {expected[0]}, {expected[1]})")
    if not np.isfinite(x).all():
        raise DataError("Input block contains non-finite values")
    return x


def forward(net: Network, inputs: np.ndarray, noise: Optional[NoiseChannel] = None,
            training: bool = False) -> Tuple[np.ndarray, Dict[str, Any]]:
    """
    Runs the network on a batch.

    Args:
        net: network
        inputs: (B, T, F) or a single (T, F) block
        noise: noise source; None feeds zeros to the noise channel
        training: enables dropout

    Returns:
        (B, output_len) outputs and the cache needed by `backward`
    """
    cfg, p = net.config, net.params
    x = _check_inputs(net, inputs)
    batch, steps, _ = x.shape

    if cfg.noise_width > 0:
        noise_block = noise.sample(batch, steps) if noise is not None else np.zeros((batch, steps, cfg.noise_width))
        z = np.concatenate([x, noise_block], axis=2)
        kernel = np.concatenate([p["conv_w"], p["conv_noise_w"]], axis=1)
    else:
        z, kernel = x, p["conv_w"]

    if training and cfg.dropout_rate > 0:
        z = z * layers.dropout_mask(z.shape, cfg.dropout_rate, net.dropout_rng)

    conv_out, conv_cache = layers.conv1d_forward(z, kernel, p["conv_b"])
    h, lstm_cache = layers.lstm_forward(conv_out, p["lstm_W"], p["lstm_U"], p["lstm_b"])
    d1, dense1_cache = layers.dense_forward(h, p["dense1_w"], p["dense1_b"], relu=True)
    out, dense2_cache = layers.dense_forward(d1, p["dense2_w"], p["dense2_b"], relu=False)
    cache = {"conv": conv_cache, "lstm": lstm_cache, "dense1": dense1_cache, "dense2": dense2_cache}
    return out, cache


def backward(net: Network, cache: Dict[str, Any], dout: np.ndarray) -> Dict[str, np.ndarray]:
    """Reverse-mode gradients of every parameter tensor for an output gradient (B, O)."""
    p = net.params
    grads = {}
    dd1, grads["dense2_w"], grads["dense2_b"] = layers.dense_backward(dout, cache["dense2"], p["dense2_w"])
    dh, grads["dense1_w"], grads["dense1_b"] = layers.dense_backward(dd1, cache["dense1"], p["dense1_w"])
    dconv, grads["lstm_W"], grads["lstm_U"], grads["lstm_b"] = layers.lstm_backward(
        dh, cache["lstm"], p["lstm_W"], p["lstm_U"]
    )
    dkernel, grads["conv_b"] = layers.conv1d_backward(dconv, cache["conv"])
    F = net.config.input_features
    grads["conv_w"] = dkernel[:, :F]
    if net.config.noise_width > 0:
        grads["conv_noise_w"] = dkernel[:, F:]
    return {name: grads[name] for name in p}


def mae_loss(pred: np.ndarray, target: np.ndarray) -> float:
    """Mean absolute difference over every element."""
    pred, target = np.asarray(pred, dtype=float), np.asarray(target, dtype=float)
    if pred.shape != target.shape:
        raise ConfigError(f"Prediction shape {pred.shape} does not match target shape {target.shape}")
    return float(np.mean(np.abs(pred - target)))


def mae_grad(pred: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Subgradient of `mae_loss`; zero at ties."""
    diff = np.asarray(pred, dtype=float) - np.asarray(target, dtype=float)
    return np.sign(diff) / diff.size


loss = mae_loss
