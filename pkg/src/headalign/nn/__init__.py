"""Self-contained neural toolkit on dense float64 numpy arrays.

Layers carry their own backward passes (no autodiff graph); the model,
optimizer, loss, and windowing pipeline are built only from this module
plus numpy.
"""

from .layers import (
    AvgPool1d,
    Conv2d,
    Dropout,
    Flatten,
    LeakyReLU,
    Linear,
    MaxPool1x2,
    Tanh,
    avgpool_rate_match,
)
from .loss import cmse_loss
from .model import (
    VARIATIONS,
    HeadingModel,
    HeadingNetConfig,
    build_headingnet,
    load_checkpoint,
    parameter_count,
    predict_heading,
    save_checkpoint,
)
from .optim import AdamW, steplr
from .data import WindowSet, make_windows
from .train import TrainConfig, train

__all__ = [
    "AvgPool1d",
    "Conv2d",
    "Dropout",
    "Flatten",
    "LeakyReLU",
    "Linear",
    "MaxPool1x2",
    "Tanh",
    "avgpool_rate_match",
    "cmse_loss",
    "AdamW",
    "steplr",
    "VARIATIONS",
    "HeadingModel",
    "HeadingNetConfig",
    "build_headingnet",
    "parameter_count",
    "predict_heading",
    "save_checkpoint",
    "load_checkpoint",
    "WindowSet",
    "make_windows",
    "TrainConfig",
    "train",
]
