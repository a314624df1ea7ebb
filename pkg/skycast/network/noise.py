"""
Skycast Network - Noise
Gaussian noise input channel standing in for unmeasured disturbances.
"""
from typing import Optional

import numpy as np

from ..schema.network import NoiseMode

NOISE_STREAM = 3


class NoiseChannel:
    """
    Seeded source of standard-normal noise blocks of shape (B, T, width).

    `per_step` draws a fresh vector for every time step; otherwise one
    vector per window is repeated across the sequence. In `zeroed` mode
    every block is zeros.
    """

    def __init__(self, width: int, seed: int = 0, mode: NoiseMode = NoiseMode.SAMPLED,
                 per_step: bool = True, stream: int = NOISE_STREAM):
        self.width = int(width)
        self.seed = int(seed)
        self.mode = NoiseMode(mode)
        self.per_step = per_step
        self.stream = stream
        self.rng = np.random.default_rng([self.seed, stream])

    @classmethod
    def zeroed(cls, width: int) -> "NoiseChannel":
        return cls(width, mode=NoiseMode.ZEROED)

    def sample(self, batch: int, steps: int) -> np.ndarray:
        if self.width == 0 or self.mode == NoiseMode.ZEROED:
            return np.zeros((batch, steps, self.width))
        if self.per_step:
            return self.rng.standard_normal((batch, steps, self.width))
        block = self.rng.standard_normal((batch, 1, self.width))
        return np.repeat(block, steps, axis=1)

    def reset(self, seed: Optional[int] = None):
        if seed is not None:
            self.seed = int(seed)
        self.rng = np.random.default_rng([self.seed, self.stream])

    def __repr__(self) -> str:
        return f"NoiseChannel(width={self.width}, mode={self.mode.value}, per_step={self.per_step})"
