"""
Skycast Network Module
numpy CNN-LSTM with a noise input channel, Adam training and checkpoints.
"""
from .noise import NoiseChannel
from .model import Network, init_network, forward, backward, mae_loss, mae_grad, loss, parameter_count, parameter_shapes
from .optim import (
    OptimizerState,
    StepResult,
    EarlyStopping,
    TrainingData,
    FitHistory,
    train_step,
    fit,
    predict,
    evaluation_noise,
)
from .gradcheck import GradCheckReport, grad_check, analytic_gradients
from .checkpoint import save, load

__all__ = [
    "NoiseChannel",
    "Network",
    "init_network",
    "forward",
    "backward",
    "mae_loss",
    "mae_grad",
    "loss",
    "parameter_count",
    "parameter_shapes",
    "OptimizerState",
    "StepResult",
    "EarlyStopping",
    "TrainingData",
    "FitHistory",
    "train_step",
    "fit",
    "predict",
    "evaluation_noise",
    "GradCheckReport",
    "grad_check",
    "analytic_gradients",
    "save",
    "load",
]
