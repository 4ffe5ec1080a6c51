"""Training loop: shuffled minibatches, cyclic loss, AdamW, step decay."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InsufficientDataError, InvalidArgumentError, TrainingDivergedError
from ..rng import stream
from .data import WindowSet
from .loss import cmse_loss
from .model import HeadingModel
from .optim import AdamW, steplr

__all__ = ["TrainConfig", "default_train_config", "train"]

#: Per-variation training hyperparameters:
#: (epochs, loss_scale, lr, weight_decay, scheduler_step).
_DEFAULTS = {
    10: (1000, 10.0, 0.0009, 0.08, 120),
    30: (1000, 10.0, 0.0008, 0.08, 120),
    60: (400, 10.0, 0.0008, 0.08, 80),
    90: (500, 100.0, 0.0005, 0.8, 150),
    120: (300, 10.0, 0.0006, 0.08, 50),
}


@dataclass
class TrainConfig:
    epochs: int
    loss_scale: float
    lr: float
    weight_decay: float
    scheduler_step: int
    seed: int
    batch: int = 512
    gamma: float = 0.8
    betas: tuple[float, float] = (0.9, 0.999)
    eps: float = 1e-8

    def __post_init__(self):
        if self.epochs < 0 or self.batch < 1:
            raise InvalidArgumentError("epochs must be >= 0 and batch >= 1")


def default_train_config(t_align: int, seed: int, **overrides) -> TrainConfig:
    """Stock hyperparameters for a variation; keyword overrides win."""
    if t_align not in _DEFAULTS:
        raise InvalidArgumentError(f"no training defaults for variation {t_align}")
    epochs, scale, lr, wd, step = _DEFAULTS[t_align]
    kwargs = dict(
        epochs=epochs, loss_scale=scale, lr=lr, weight_decay=wd,
        scheduler_step=step, seed=seed,
    )
    kwargs.update(overrides)
    return TrainConfig(**kwargs)


def train(
    model: HeadingModel, windows: WindowSet, cfg: TrainConfig
) -> tuple[HeadingModel, list[tuple[int, float, float]]]:
    """Fit the model; returns it in eval mode plus per-epoch history rows
    ``(epoch, lr, train_loss)``.

    Normalization statistics attached to the window set are frozen into
    the model before the first step.  A non-finite loss aborts with the
    epoch, batch, and first offending layer.
    """
    n = len(windows)
    if n == 0:
        raise InsufficientDataError("empty window set")
    if windows.stats is not None:
        model.norm = {k: np.array(v, dtype=float) for k, v in windows.stats.items()}

    model.train()
    opt = AdamW(
        model.params(), lr=cfg.lr, weight_decay=cfg.weight_decay,
        betas=cfg.betas, eps=cfg.eps,
    )
    history: list[tuple[int, float, float]] = []
    for epoch in range(cfg.epochs):
        opt.lr = steplr(cfg.lr, cfg.gamma, cfg.scheduler_step, epoch)
        order = stream(cfg.seed, "shuffle", epoch).permutation(n)
        total = 0.0
        for bi, lo in enumerate(range(0, n, cfg.batch)):
            idx = order[lo : lo + cfg.batch]
            x1, x2, y = windows.x1[idx], windows.x2[idx], windows.y[idx]
            rng = stream(cfg.seed, "dropout", epoch, bi)
            pred = model.forward(x1, x2, rng=rng)
            loss, dpred = cmse_loss(pred, y, cfg.loss_scale)
            if not np.isfinite(loss):
                model.eval()
                bad = model.check_finite(x1, x2)
                where = f"first non-finite output in layer {bad!r}" if bad else "non-finite loss only"
                raise TrainingDivergedError(
                    f"non-finite loss at epoch {epoch}, batch {bi}: {where}"
                )
            model.backward(dpred)
            opt.step()
            total += loss * idx.size
        history.append((epoch, opt.lr, total / n))
    model.eval()
    return model, history
