"""Optimizer and learning-rate schedule."""

from __future__ import annotations

import numpy as np

from ..errors import InvalidArgumentError, ShapeError

__all__ = ["AdamW", "steplr"]


def steplr(lr0: float, gamma: float, step_size: int, epoch: int) -> float:
    """Staircase decay: lr0 * gamma^floor(epoch / step_size)."""
    if step_size < 1:
        raise InvalidArgumentError(f"scheduler step must be >= 1, got {step_size}")
    return lr0 * gamma ** (epoch // step_size)


class AdamW:
    """Adam with decoupled weight decay.

    The moment step uses bias-corrected first/second moments; the decay
    is applied separately as theta <- theta - lr * wd * theta, so with a
    zero gradient parameters shrink by exactly (1 - lr * wd) per step.
    """

    def __init__(
        self,
        params: list[tuple[str, np.ndarray, np.ndarray]],
        lr: float = 1e-3,
        weight_decay: float = 0.0,
        betas: tuple[float, float] = (0.9, 0.999),
        eps: float = 1e-8,
    ):
        self.params = params
        self.lr = float(lr)
        self.weight_decay = float(weight_decay)
        self.beta1, self.beta2 = betas
        self.eps = float(eps)
        self.t = 0
        self._m = {name: np.zeros_like(p) for name, p, _ in params}
        self._v = {name: np.zeros_like(p) for name, p, _ in params}

    def step(self) -> None:
        self.t += 1
        c1 = 1.0 - self.beta1**self.t
        c2 = 1.0 - self.beta2**self.t
        for name, p, g in self.params:
            if g.shape != p.shape:
                raise ShapeError(f"{name}: gradient shape {g.shape} != parameter {p.shape}")
            m = self._m[name]
            v = self._v[name]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * (g * g)
            p -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)
            if self.weight_decay:
                p -= self.lr * self.weight_decay * p

    def zero_grad(self) -> None:
        for _, _, g in self.params:
            g[...] = 0.0
