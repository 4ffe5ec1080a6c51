"""Layers with hand-written forward/backward passes.

Every layer works on float64 numpy arrays shaped (batch, channels,
height, width) unless noted, caches what its backward pass needs, and
exposes ``params()`` as a list of (name, value, grad) triples sharing
storage with the layer.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from numpy.typing import NDArray

from ..errors import InvalidArgumentError, ShapeError

__all__ = [
    "Conv2d",
    "MaxPool1x2",
    "LeakyReLU",
    "Tanh",
    "Dropout",
    "Linear",
    "Flatten",
    "AvgPool1d",
    "avgpool_rate_match",
]

Array = NDArray[np.float64]


class Layer:
    """Base: stateless unless a subclass stores parameters or cache."""

    name: str = ""

    def params(self) -> list[tuple[str, Array, Array]]:
        return []

    def forward(self, x: Array, training: bool = False, rng=None) -> Array:
        raise NotImplementedError

    def backward(self, dy: Array) -> Array:
        raise NotImplementedError


class Conv2d(Layer):
    """Valid cross-correlation, stride 1: out (N, O, H-kh+1, W-kw+1).

    Weight layout (out_ch, in_ch, kh, kw); one bias per output channel.
    """

    def __init__(self, in_ch: int, out_ch: int, kernel: tuple[int, int], name: str = "conv"):
        kh, kw = kernel
        if kh < 1 or kw < 1:
            raise InvalidArgumentError(f"{name}: kernel must be positive, got {kernel}")
        self.in_ch, self.out_ch, self.kh, self.kw = in_ch, out_ch, kh, kw
        self.name = name
        self.W = np.zeros((out_ch, in_ch, kh, kw))
        self.b = np.zeros(out_ch)
        self.dW = np.zeros_like(self.W)
        self.db = np.zeros_like(self.b)
        self._x: Array | None = None

    def params(self):
        return [(f"{self.name}.W", self.W, self.dW), (f"{self.name}.b", self.b, self.db)]

    def forward(self, x: Array, training: bool = False, rng=None) -> Array:
        if x.ndim != 4 or x.shape[1] != self.in_ch:
            raise ShapeError(f"{self.name}: expected (N, {self.in_ch}, H, W), got {x.shape}")
        if x.shape[2] < self.kh or x.shape[3] < self.kw:
            raise ShapeError(
                f"{self.name}: kernel ({self.kh}x{self.kw}) larger than input {x.shape[2:]}"
            )
        self._x = x
        win = sliding_window_view(x, (self.kh, self.kw), axis=(2, 3))
        # win: (N, C, Ho, Wo, kh, kw); contract C, kh, kw against W
        y = np.tensordot(win, self.W, axes=([1, 4, 5], [1, 2, 3]))
        return np.ascontiguousarray(y.transpose(0, 3, 1, 2)) + self.b[None, :, None, None]

    def backward(self, dy: Array) -> Array:
        x = self._x
        win = sliding_window_view(x, (self.kh, self.kw), axis=(2, 3))
        self.db[...] = dy.sum(axis=(0, 2, 3))
        # dW[o,c,a,b] = sum_{n,i,j} dy[n,o,i,j] win[n,c,i,j,a,b]
        self.dW[...] = np.tensordot(dy, win, axes=([0, 2, 3], [0, 2, 3]))
        # dx: full correlation of dy with the spatially flipped kernel
        pad = ((0, 0), (0, 0), (self.kh - 1, self.kh - 1), (self.kw - 1, self.kw - 1))
        dyp = np.pad(dy, pad)
        dwin = sliding_window_view(dyp, (self.kh, self.kw), axis=(2, 3))
        Wf = self.W[:, :, ::-1, ::-1]
        dx = np.tensordot(dwin, Wf, axes=([1, 4, 5], [0, 2, 3]))
        return np.ascontiguousarray(dx.transpose(0, 3, 1, 2))


class MaxPool1x2(Layer):
    """(1, 2) max pool, stride 2 along width; odd width drops the last
    column.  Backward routes each gradient to the window argmax, first
    element on ties."""

    def __init__(self, name: str = "pool"):
        self.name = name
        self._first: Array | None = None

    def forward(self, x: Array, training: bool = False, rng=None) -> Array:
        w = x.shape[-1] - (x.shape[-1] % 2)
        a = x[..., 0:w:2]
        b = x[..., 1:w:2]
        self._first = a >= b  # ties keep the first element
        self._in_width = x.shape[-1]
        return np.where(self._first, a, b)

    def backward(self, dy: Array) -> Array:
        dx = np.zeros(dy.shape[:-1] + (self._in_width,))
        w = self._in_width - (self._in_width % 2)
        dx[..., 0:w:2] = np.where(self._first, dy, 0.0)
        dx[..., 1:w:2] = np.where(self._first, 0.0, dy)
        return dx


class LeakyReLU(Layer):
    """max(x, 0) + alpha * min(x, 0); slope alpha for x <= 0."""

    def __init__(self, alpha: float, name: str = "lrelu"):
        self.alpha = float(alpha)
        self.name = name
        self._pos: Array | None = None

    def forward(self, x: Array, training: bool = False, rng=None) -> Array:
        self._pos = x > 0
        return np.where(self._pos, x, self.alpha * x)

    def backward(self, dy: Array) -> Array:
        return np.where(self._pos, dy, self.alpha * dy)


class Tanh(Layer):
    def __init__(self, name: str = "tanh"):
        self.name = name
        self._y: Array | None = None

    def forward(self, x: Array, training: bool = False, rng=None) -> Array:
        self._y = np.tanh(x)
        return self._y

    def backward(self, dy: Array) -> Array:
        return dy * (1.0 - self._y * self._y)


class Dropout(Layer):
    """Inverted dropout: keep with probability 1-p and scale by 1/(1-p)
    during training; identity in eval mode."""

    def __init__(self, p: float, name: str = "dropout"):
        if not 0.0 <= p < 1.0:
            raise InvalidArgumentError(f"{name}: dropout p must be in [0, 1), got {p}")
        self.p = float(p)
        self.name = name
        self._mask: Array | None = None

    def forward(self, x: Array, training: bool = False, rng=None) -> Array:
        if not training or self.p == 0.0:
            self._mask = None
            return x
        if rng is None:
            raise InvalidArgumentError(f"{self.name}: training-mode dropout needs an rng")
        keep = 1.0 - self.p
        self._mask = (rng.random(x.shape) < keep) / keep
        return x * self._mask

    def backward(self, dy: Array) -> Array:
        if self._mask is None:
            return dy
        return dy * self._mask


class Linear(Layer):
    """Affine map on (N, in) inputs: y = x W^T + b."""

    def __init__(self, in_features: int, out_features: int, name: str = "fc"):
        self.in_features, self.out_features = in_features, out_features
        self.name = name
        self.W = np.zeros((out_features, in_features))
        self.b = np.zeros(out_features)
        self.dW = np.zeros_like(self.W)
        self.db = np.zeros_like(self.b)
        self._x: Array | None = None

    def params(self):
        return [(f"{self.name}.W", self.W, self.dW), (f"{self.name}.b", self.b, self.db)]

    def forward(self, x: Array, training: bool = False, rng=None) -> Array:
        if x.ndim != 2 or x.shape[1] != self.in_features:
            raise ShapeError(f"{self.name}: expected (N, {self.in_features}), got {x.shape}")
        self._x = x
        return x @ self.W.T + self.b

    def backward(self, dy: Array) -> Array:
        self.dW[...] = dy.T @ self._x
        self.db[...] = dy.sum(axis=0)
        return dy @ self.W


class Flatten(Layer):
    def __init__(self, name: str = "flatten"):
        self.name = name
        self._shape: tuple[int, ...] | None = None

    def forward(self, x: Array, training: bool = False, rng=None) -> Array:
        self._shape = x.shape
        return x.reshape(x.shape[0], -1)

    def backward(self, dy: Array) -> Array:
        return dy.reshape(self._shape)


class AvgPool1d(Layer):
    """Non-overlapping mean over blocks of k along the last axis."""

    def __init__(self, k: int, name: str = "avgpool"):
        if k < 1:
            raise InvalidArgumentError(f"{name}: pool factor must be >= 1, got {k}")
        self.k = int(k)
        self.name = name

    def forward(self, x: Array, training: bool = False, rng=None) -> Array:
        return avgpool_rate_match(x, self.k)

    def backward(self, dy: Array) -> Array:
        return np.repeat(dy, self.k, axis=-1) / self.k


def avgpool_rate_match(x: Array, k: int) -> Array:
    """Mean over non-overlapping blocks of ``k`` along the last axis.

    Used to bring the 100 Hz inertial rows down to the 5 Hz aiding rate
    (k = 20) before they enter the network.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    if k < 1 or n % k != 0:
        raise ShapeError(f"pool factor {k} does not divide width {n}")
    return x.reshape(x.shape[:-1] + (n // k, k)).mean(axis=-1)
