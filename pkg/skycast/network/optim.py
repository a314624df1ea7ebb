"""
Skycast Network - Optimization
Adam updates, the epoch loop with early stopping, and batched inference.
"""
import logging
import os
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np
import pandas as pd

from ..errors import ConfigError, NumericalError
from ..schema.features import Normalization
from ..schema.network import NoiseMode, TrainingConfig
from .model import Network, backward, forward, mae_grad, mae_loss
from .noise import NoiseChannel

logger = logging.getLogger(__name__)

SHUFFLE_STREAM = 1
EPOCH_LOG_COLUMNS = ["epoch", "train_mae", "val_mae", "wall_s"]


class OptimizerState:
    """Adam moment accumulators mirroring the network parameters."""

    def __init__(self, net: Network, learning_rate: float = 1e-3, beta1: float = 0.9,
                 beta2: float = 0.999, epsilon: float = 1e-8):
        self.lr = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = epsilon
        self.step = 0
        self.m = {name: np.zeros_like(p) for name, p in net.params.items()}
        self.v = {name: np.zeros_like(p) for name, p in net.params.items()}

    @classmethod
    def from_config(cls, net: Network, training: TrainingConfig) -> "OptimizerState":
        return cls(net, training.learning_rate, training.beta1, training.beta2, training.epsilon)

    def apply(self, net: Network, grads: Dict[str, np.ndarray]):
        self.step += 1
        correction1 = 1.0 - self.beta1 ** self.step
        correction2 = 1.0 - self.beta2 ** self.step
        for name, g in grads.items():
            self.m[name] = self.beta1 * self.m[name] + (1.0 - self.beta1) * g
            self.v[name] = self.beta2 * self.v[name] + (1.0 - self.beta2) * g ** 2
            if self.lr == 0.0:
                continue
            m_hat = self.m[name] / correction1
            v_hat = self.v[name] / correction2
            net.params[name] -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


@dataclass
class StepResult:
    loss: float
    accepted: bool = True


def train_step(net: Network, opt: OptimizerState, inputs: np.ndarray, targets: np.ndarray,
               noise: Optional[NoiseChannel] = None) -> StepResult:
    """
    One MAE gradient step on a batch.

    The returned loss is the pre-update batch loss. A non-finite gradient
    skips the update and is reported with `accepted=False`.

    Raises:
        ConfigError: empty batch
        NumericalError: parameters became non-finite after the update
    """
    if len(inputs) == 0:
        raise ConfigError("train_step needs a nonempty batch")
    pred, cache = forward(net, inputs, noise, training=True)
    batch_loss = mae_loss(pred, targets)
    grads = backward(net, cache, mae_grad(pred, targets))

    bad = [name for name, g in grads.items() if not np.isfinite(g).all()]
    if bad or not np.isfinite(batch_loss):
        logger.warning(f"⚠️ Rejected step {opt.step + 1}: non-finite gradient in {bad or ['loss']}")
        return StepResult(batch_loss, accepted=False)

    opt.apply(net, grads)
    if not net.all_finite():
        raise NumericalError(f"Parameters became non-finite after step {opt.step}")
    return StepResult(batch_loss)


class EarlyStopping:
    """
    Stops when the validation loss has not improved by more than
    `min_delta` for `patience` consecutive epochs.
    """

    def __init__(self, patience: int = 10, min_delta: float = 0.0):
        self.patience = patience
        self.min_delta = min_delta
        self.counter = 0
        self.best_loss = None
        self.best_epoch = None
        self.early_stop = False

    def __call__(self, val_loss: float, epoch: int) -> bool:
        """Returns True when `val_loss` is a new best."""
        if self.best_loss is None or self.best_loss - val_loss > self.min_delta:
            self.best_loss = val_loss
            self.best_epoch = epoch
            self.counter = 0
            return True
        self.counter += 1
        if self.counter >= self.patience:
            self.early_stop = True
        return False


@dataclass
class TrainingData:
    """
    Network inputs and encoded targets.

    `decode` maps encoded predictions (N, H) to GHI so validation MAE is
    measured in W/m²; without it the encoded targets are compared directly.
    """
    inputs: np.ndarray
    targets: np.ndarray
    ghi_true: Optional[np.ndarray] = None
    decode: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __len__(self) -> int:
        return len(self.inputs)


@dataclass
class FitHistory:
    epochs: List[Dict[str, float]] = field(default_factory=list)
    best_epoch: Optional[int] = None
    best_val_mae: float = float("nan")
    stopped_early: bool = False

    @property
    def epochs_run(self) -> int:
        return len(self.epochs)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.epochs, columns=EPOCH_LOG_COLUMNS)


def _horizon_names(n: int) -> List[str]:
    return [f"h{k + 1}" for k in range(n)]


def predict(net: Network, inputs: np.ndarray, noise: Optional[NoiseChannel] = None,
            batch_size: int = 1024) -> np.ndarray:
    """
    Eval-mode outputs in the encoded target space, batched.

    Args:
        net: trained network
        inputs: (N, T, F) normalized input blocks
        noise: noise source; None feeds zeros
        batch_size: rows per forward pass

    Returns:
        (N, output_len) encoded predictions
    """
    inputs = np.asarray(inputs, dtype=float)
    if len(inputs) == 0:
        return np.zeros((0, net.config.output_len))
    outputs = [forward(net, inputs[i:i + batch_size], noise, training=False)[0]
               for i in range(0, len(inputs), batch_size)]
    out = np.concatenate(outputs, axis=0)
    if net.target_scaler is not None:
        out = net.target_scaler.restore(out)
    return out


def evaluation_noise(net: Network, training: TrainingConfig, seed: int = 0) -> Optional[NoiseChannel]:
    """Noise source for inference: None (zeros) unless `sampled` is configured."""
    if net.config.noise_width == 0 or training.inference_noise == NoiseMode.ZEROED:
        return None
    return NoiseChannel(net.config.noise_width, seed, NoiseMode.SAMPLED, net.config.noise_per_step)


def _validation_mae(net: Network, data: TrainingData, noise: Optional[NoiseChannel]) -> float:
    pred = predict(net, data.inputs, noise)
    if data.decode is not None and data.ghi_true is not None:
        return mae_loss(data.decode(pred), data.ghi_true)
    return mae_loss(pred, data.targets)


def _write_log(path: str, history: FitHistory):
    folder = os.path.dirname(path)
    if folder:
        os.makedirs(folder, exist_ok=True)
    history.to_frame().to_csv(path, index=False)


def fit(net: Network, train: TrainingData, validate: Optional[TrainingData], training: TrainingConfig,
        seed: Optional[int] = None, log_path: Optional[str] = None, fast: bool = False) -> FitHistory:
    """
    Epoch loop with seeded shuffling, minibatches and early stopping on
    validation MAE. The best weights are restored at the end.

    Args:
        net: network to train in place
        train: training inputs and encoded targets
        validate: held-out data; without it the training MAE drives stopping
        training: optimizer and loop settings
        seed: shuffle and noise seed (defaults to the network seed)
        log_path: epoch log CSV (epoch, train_mae, val_mae, wall_s)
        fast: use `training.fast_epochs`

    Returns:
        FitHistory
    """
    if len(train) == 0:
        raise ConfigError("fit needs at least one training window")
    seed = net.seed if seed is None else int(seed)
    cfg = net.config

    targets = np.asarray(train.targets, dtype=float)
    if training.scale_targets:
        net.target_scaler = Normalization.fit(_horizon_names(cfg.output_len), targets)
        targets = net.target_scaler.apply(targets)
    else:
        net.target_scaler = None

    opt = OptimizerState.from_config(net, training)
    shuffle_rng = np.random.default_rng([seed, SHUFFLE_STREAM])
    noise = NoiseChannel(cfg.noise_width, seed, NoiseMode.SAMPLED, cfg.noise_per_step) if cfg.noise_width else None
    eval_noise = evaluation_noise(net, training, seed)
    stopper = EarlyStopping(training.patience, training.min_delta)
    history = FitHistory()
    best_params = net.copy_params()
    max_epochs = training.epochs(fast)

    logger.info(f"🧠 Training {net} on {len(train)} windows for up to {max_epochs} epochs")
    for epoch in range(1, max_epochs + 1):
        started = time.perf_counter()
        order = shuffle_rng.permutation(len(train))
        losses, sizes, rejected = [], [], 0
        for i in range(0, len(order), training.batch_size):
            idx = order[i:i + training.batch_size]
            result = train_step(net, opt, train.inputs[idx], targets[idx], noise)
            if not result.accepted:
                rejected += 1
                continue
            losses.append(result.loss)
            sizes.append(len(idx))
        if not losses:
            raise NumericalError(f"Every step of epoch {epoch} was rejected ({rejected} steps)")

        train_mae = float(np.average(losses, weights=sizes))
        val_mae = _validation_mae(net, validate, eval_noise) if validate is not None and len(validate) else train_mae
        row = {"epoch": epoch, "train_mae": train_mae, "val_mae": val_mae,
               "wall_s": time.perf_counter() - started}
        history.epochs.append(row)
        if log_path:
            _write_log(log_path, history)

        if stopper(val_mae, epoch):
            best_params = net.copy_params()
        logger.debug(f"📊 Epoch {epoch}: train {train_mae:.4f}, val {val_mae:.4f}")
        if stopper.early_stop:
            history.stopped_early = True
            logger.info(f"⏹️ Early stop at epoch {epoch}, best epoch {stopper.best_epoch}")
            break

    net.set_params(best_params)
    history.best_epoch = stopper.best_epoch
    history.best_val_mae = float(stopper.best_loss)
    logger.info(f"✅ Training done: best val MAE {history.best_val_mae:.3f} at epoch {history.best_epoch}")
    return history
