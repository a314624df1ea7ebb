"""
Skycast Schema - Network
Architecture hyperparameters and the noise-channel mode.
"""
from dataclasses import asdict, dataclass, fields
from enum import Enum
from typing import Any, Dict

from ..errors import ConfigError


class NoiseMode(str, Enum):
    SAMPLED = "sampled"
    ZEROED = "zeroed"


@dataclass(frozen=True)
class NetworkConfig:
    """
    Dropout -> Conv1D -> LSTM -> Dense -> Dense with a Gaussian noise input.

    Defaults are the desk-scale choices; every field is overridable from the
    experiment config.
    """
    input_features: int
    seq_len: int = 1
    noise_width: int = 16
    dropout_rate: float = 0.2
    conv_filters: int = 64
    conv_kernel: int = 3
    lstm_hidden: int = 64
    dense_hidden: int = 128
    output_len: int = 12
    seed: int = 0
    noise_per_step: bool = True

    def __post_init__(self):
        for name in ("input_features", "seq_len", "conv_filters", "conv_kernel", "lstm_hidden", "dense_hidden", "output_len"):
            if int(getattr(self, name)) < 1:
                raise ConfigError(f"NetworkConfig.{name} must be >= 1, got {getattr(self, name)}")
        if self.noise_width < 0:
            raise ConfigError(f"NetworkConfig.noise_width must be >= 0, got {self.noise_width}")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ConfigError(f"NetworkConfig.dropout_rate must be in [0, 1), got {self.dropout_rate}")
        if self.conv_kernel % 2 == 0:
            raise ConfigError(f"NetworkConfig.conv_kernel must be odd, got {self.conv_kernel}")

    @property
    def kernel_eff(self) -> int:
        """Kernel width actually used; collapses to a 1x1 feature-mixing map at T=1."""
        return min(self.conv_kernel, self.seq_len)

    @property
    def conv_steps(self) -> int:
        return self.seq_len - self.kernel_eff + 1

    def replace(self, **changes) -> "NetworkConfig":
        data = asdict(self)
        data.update(changes)
        return NetworkConfig(**data)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "NetworkConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"Unknown network config keys: {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class TrainingConfig:
    """Optimizer and epoch-loop settings."""
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    batch_size: int = 256
    max_epochs: int = 100
    fast_epochs: int = 10
    patience: int = 10
    min_delta: float = 0.0
    inference_noise: NoiseMode = NoiseMode.ZEROED
    scale_targets: bool = True

    def __post_init__(self):
        object.__setattr__(self, "inference_noise", NoiseMode(self.inference_noise))
        if self.learning_rate < 0:
            raise ConfigError(f"learning_rate must be >= 0, got {self.learning_rate}")
        if self.batch_size < 1 or self.max_epochs < 1 or self.patience < 1:
            raise ConfigError("batch_size, max_epochs and patience must be >= 1")

    def epochs(self, fast: bool) -> int:
        return min(self.fast_epochs, self.max_epochs) if fast else self.max_epochs

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TrainingConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"Unknown training config keys: {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["inference_noise"] = self.inference_noise.value
        return data
