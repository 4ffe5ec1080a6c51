"""Two-branch heading-regression network: builder, forward/backward,
checkpoint round trip.

Branch 1 consumes the six body-frame inertial rows (rate-matched to the
aiding rate), branch 2 the six navigation-frame reference rows.  Each
branch runs three conv stages (channels 1 -> 16 -> 32 -> 64); the branch
outputs are stacked along the height axis and fused by one or two more
conv stages (64 -> 128), then flattened into a 512/128/32/1 FC stack
with tanh and dropout between the first three FC layers.  The scalar
output is the heading estimate in radians at the window end.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from ..attitude import wrap_angle
from ..errors import HeadAlignError, InvalidArgumentError, ShapeError
from ..rng import stream
from .layers import Conv2d, Dropout, Flatten, Layer, LeakyReLU, Linear, MaxPool1x2, Tanh

__all__ = [
    "VARIATIONS",
    "HeadingNetConfig",
    "HeadingModel",
    "build_headingnet",
    "parameter_count",
    "predict_heading",
    "save_checkpoint",
    "load_checkpoint",
]

Array = NDArray[np.float64]

CHECKPOINT_MAGIC = b"HDGNET1\n"
CHECKPOINT_VERSION = "1"

#: Per-variation architecture: three branch conv kernels, whether the
#: third conv stage pools, the fusion kernels (kernel5 may be None), and
#: the leaky slope.  Keyed by alignment time in seconds.
VARIATIONS: dict[int, dict] = {
    10: dict(k1=(2, 10), k2=(2, 7), k3=(2, 5), pool3=False, k4=(3, 3), k5=None, alpha=0.05),
    30: dict(k1=(2, 30), k2=(2, 22), k3=(2, 15), pool3=False, k4=(2, 3), k5=(2, 3), alpha=0.05),
    60: dict(k1=(2, 60), k2=(2, 45), k3=(2, 30), pool3=False, k4=(2, 6), k5=(2, 3), alpha=0.05),
    90: dict(k1=(2, 90), k2=(2, 67), k3=(2, 45), pool3=True, k4=(2, 4), k5=(2, 3), alpha=0.1),
    120: dict(k1=(2, 120), k2=(2, 90), k3=(2, 60), pool3=True, k4=(2, 5), k5=(2, 3), alpha=0.05),
}

#: FC widths after the computed flatten size.
FC_WIDTHS = (512, 128, 32, 1)

#: Dropout keep setting per variation (probability of dropping).
DROPOUT_P = {10: 0.2, 30: 0.2, 60: 0.2, 90: 0.2, 120: 0.3}

#: IMU-to-aiding rate ratio handled by the input average pool.
RATE_MATCH_K = 20


@dataclass
class HeadingNetConfig:
    """Everything needed to rebuild a variation's architecture."""

    t_align: int
    k1: tuple[int, int]
    k2: tuple[int, int]
    k3: tuple[int, int]
    pool3: bool
    k4: tuple[int, int]
    k5: tuple[int, int] | None
    leaky_alpha: float
    dropout_p: float
    avgpool_k: int = RATE_MATCH_K
    input_rows: int = 6
    input_width: int = field(init=False)

    def __post_init__(self):
        self.input_width = 5 * self.t_align

    def to_dict(self) -> dict:
        return {
            "t_align": self.t_align,
            "k1": list(self.k1),
            "k2": list(self.k2),
            "k3": list(self.k3),
            "pool3": self.pool3,
            "k4": list(self.k4),
            "k5": list(self.k5) if self.k5 else None,
            "leaky_alpha": self.leaky_alpha,
            "dropout_p": self.dropout_p,
            "avgpool_k": self.avgpool_k,
            "input_rows": self.input_rows,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "HeadingNetConfig":
        return cls(
            t_align=int(d["t_align"]),
            k1=tuple(d["k1"]),
            k2=tuple(d["k2"]),
            k3=tuple(d["k3"]),
            pool3=bool(d["pool3"]),
            k4=tuple(d["k4"]),
            k5=tuple(d["k5"]) if d.get("k5") else None,
            leaky_alpha=float(d["leaky_alpha"]),
            dropout_p=float(d["dropout_p"]),
            avgpool_k=int(d.get("avgpool_k", RATE_MATCH_K)),
            input_rows=int(d.get("input_rows", 6)),
        )

    @classmethod
    def for_variation(cls, t_align: int) -> "HeadingNetConfig":
        if t_align not in VARIATIONS:
            raise InvalidArgumentError(
                f"unknown variation {t_align}; expected one of {sorted(VARIATIONS)}"
            )
        v = VARIATIONS[t_align]
        return cls(
            t_align=t_align,
            k1=v["k1"],
            k2=v["k2"],
            k3=v["k3"],
            pool3=v["pool3"],
            k4=v["k4"],
            k5=v["k5"],
            leaky_alpha=v["alpha"],
            dropout_p=DROPOUT_P[t_align],
        )


def _branch_layers(cfg: HeadingNetConfig, tag: str) -> list[Layer]:
    a = cfg.leaky_alpha
    layers: list[Layer] = [
        Conv2d(1, 16, cfg.k1, name=f"{tag}.conv1"),
        MaxPool1x2(name=f"{tag}.pool1"),
        LeakyReLU(a, name=f"{tag}.act1"),
        Conv2d(16, 32, cfg.k2, name=f"{tag}.conv2"),
        MaxPool1x2(name=f"{tag}.pool2"),
        LeakyReLU(a, name=f"{tag}.act2"),
        Conv2d(32, 64, cfg.k3, name=f"{tag}.conv3"),
    ]
    if cfg.pool3:
        layers.append(MaxPool1x2(name=f"{tag}.pool3"))
    layers.append(LeakyReLU(a, name=f"{tag}.act3"))
    return layers


def _run(layers: list[Layer], x: Array, training: bool, rng) -> Array:
    for layer in layers:
        x = layer.forward(x, training=training, rng=rng)
    return x


def _run_back(layers: list[Layer], dy: Array) -> Array:
    for layer in reversed(layers):
        dy = layer.backward(dy)
    return dy


class HeadingModel:
    """Parameter container plus forward/backward over the fixed layout."""

    def __init__(self, config: HeadingNetConfig):
        self.config = config
        self.branch1 = _branch_layers(config, "b1")
        self.branch2 = _branch_layers(config, "b2")

        a = config.leaky_alpha
        trunk: list[Layer] = [Conv2d(64, 128, config.k4, name="fuse.conv4"), LeakyReLU(a, name="fuse.act4")]
        if config.k5 is not None:
            trunk += [Conv2d(128, 128, config.k5, name="fuse.conv5"), LeakyReLU(a, name="fuse.act5")]
        trunk.append(Flatten(name="fuse.flatten"))
        self.trunk = trunk

        self.flatten_size = self._probe_flatten()
        p = config.dropout_p
        fc: list[Layer] = []
        widths = (self.flatten_size,) + FC_WIDTHS
        for i, (nin, nout) in enumerate(zip(widths[:-1], widths[1:]), start=1):
            fc.append(Linear(nin, nout, name=f"fc{i}"))
            if i < len(FC_WIDTHS):
                fc.append(Tanh(name=f"fc{i}.tanh"))
                fc.append(Dropout(p, name=f"fc{i}.dropout"))
        self.fc = fc

        self.training = False
        rows = config.input_rows
        # identity normalization until training statistics are frozen in
        self.norm = {
            "mean1": np.zeros(rows), "std1": np.ones(rows),
            "mean2": np.zeros(rows), "std2": np.ones(rows),
        }

    def _probe_flatten(self) -> int:
        cfg = self.config
        x = np.zeros((1, 1, cfg.input_rows, cfg.input_width))
        h = _run(self.branch1, x, False, None)
        z = np.concatenate([h, h], axis=2)
        return _run(self.trunk, z, False, None).shape[1]

    # -- parameter plumbing -------------------------------------------------

    def layers(self) -> list[Layer]:
        return self.branch1 + self.branch2 + self.trunk + self.fc

    def params(self) -> list[tuple[str, Array, Array]]:
        out = []
        for layer in self.layers():
            out.extend(layer.params())
        return out

    def train(self) -> "HeadingModel":
        self.training = True
        return self

    def eval(self) -> "HeadingModel":
        self.training = False
        return self

    # -- forward / backward -------------------------------------------------

    def _normalize(self, x: Array, which: str) -> Array:
        mean = self.norm[f"mean{which}"]
        std = self.norm[f"std{which}"]
        return (x - mean[None, None, :, None]) / std[None, None, :, None]

    def forward(self, x1: Array, x2: Array, rng=None) -> Array:
        """Window batch (N, 1, rows, width) x2 -> heading estimates (N,)."""
        cfg = self.config
        want = (1, cfg.input_rows, cfg.input_width)
        if x1.ndim != 4 or x1.shape[1:] != want or x2.shape != x1.shape:
            raise ShapeError(
                f"expected two (N, 1, {cfg.input_rows}, {cfg.input_width}) inputs, "
                f"got {x1.shape} and {x2.shape}"
            )
        h1 = _run(self.branch1, self._normalize(x1, "1"), self.training, rng)
        h2 = _run(self.branch2, self._normalize(x2, "2"), self.training, rng)
        self._h_rows = h1.shape[2]
        z = np.concatenate([h1, h2], axis=2)
        z = _run(self.trunk, z, self.training, rng)
        z = _run(self.fc, z, self.training, rng)
        return z[:, 0]

    def backward(self, dpred: Array) -> None:
        """Accumulate parameter gradients from dloss/dpred (N,)."""
        dy = dpred[:, None]
        dy = _run_back(self.fc, dy)
        dz = _run_back(self.trunk, dy)
        _run_back(self.branch1, dz[:, :, : self._h_rows, :])
        _run_back(self.branch2, dz[:, :, self._h_rows :, :])

    def check_finite(self, x1: Array, x2: Array) -> str | None:
        """Name the first layer whose output is non-finite, else None."""
        x = self._normalize(x1, "1")
        for layer in self.branch1:
            x = layer.forward(x, training=False)
            if not np.all(np.isfinite(x)):
                return layer.name
        h1 = x
        x = self._normalize(x2, "2")
        for layer in self.branch2:
            x = layer.forward(x, training=False)
            if not np.all(np.isfinite(x)):
                return layer.name
        x = np.concatenate([h1, x], axis=2)
        for layer in self.trunk + self.fc:
            x = layer.forward(x, training=False)
            if not np.all(np.isfinite(x)):
                return layer.name
        return None


def build_headingnet(t_align: int, seed: int = 0) -> HeadingModel:
    """Construct a variation and initialize weights uniform over
    +-sqrt(6 / fan_in) from per-parameter keyed streams; biases zero."""
    model = HeadingModel(HeadingNetConfig.for_variation(t_align))
    for name, p, _ in model.params():
        if name.endswith(".b"):
            continue
        if p.ndim == 4:
            fan_in = p.shape[1] * p.shape[2] * p.shape[3]
        else:
            fan_in = p.shape[1]
        bound = np.sqrt(6.0 / fan_in)
        p[...] = stream(seed, "init", name).uniform(-bound, bound, p.shape)
    return model


def parameter_count(model: HeadingModel) -> int:
    return sum(p.size for _, p, _ in model.params())


def predict_heading(model: HeadingModel, x1: Array, x2: Array) -> float:
    """Single-window inference; the output is wrapped to (-pi, pi]."""
    if model.training:
        raise HeadAlignError("model must be in eval mode for inference")
    if x1.ndim == 3:
        x1 = x1[None]
    if x2.ndim == 3:
        x2 = x2[None]
    return float(wrap_angle(model.forward(x1, x2)[0]))


# -- checkpoint ----------------------------------------------------------


def save_checkpoint(model: HeadingModel, path: str) -> None:
    """Single-file checkpoint: magic, JSON header (config, normalization,
    parameter manifest, sha256 of the data section), then raw
    little-endian float64 parameter blocks."""
    blobs = []
    manifest = []
    offset = 0
    for name, p, _ in model.params():
        raw = np.ascontiguousarray(p, dtype="<f8").tobytes()
        manifest.append({"name": name, "shape": list(p.shape), "offset": offset, "nbytes": len(raw)})
        blobs.append(raw)
        offset += len(raw)
    data = b"".join(blobs)
    header = {
        "version": CHECKPOINT_VERSION,
        "config": model.config.to_dict(),
        "norm": {k: v.tolist() for k, v in model.norm.items()},
        "manifest": manifest,
        "checksum": hashlib.sha256(data).hexdigest(),
    }
    hdr = json.dumps(header, sort_keys=True).encode()
    with open(path, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(struct.pack("<Q", len(hdr)))
        fh.write(hdr)
        fh.write(data)


def load_checkpoint(path: str) -> HeadingModel:
    """Rebuild a model from a checkpoint; verifies the data checksum."""
    with open(path, "rb") as fh:
        magic = fh.read(len(CHECKPOINT_MAGIC))
        if magic != CHECKPOINT_MAGIC:
            raise HeadAlignError(f"{path}: not a model checkpoint")
        (hlen,) = struct.unpack("<Q", fh.read(8))
        header = json.loads(fh.read(hlen))
        data = fh.read()
    if header.get("version") != CHECKPOINT_VERSION:
        raise HeadAlignError(f"{path}: unsupported checkpoint version {header.get('version')!r}")
    if hashlib.sha256(data).hexdigest() != header["checksum"]:
        raise HeadAlignError(f"{path}: checkpoint data corrupted (checksum mismatch)")

    model = HeadingModel(HeadingNetConfig.from_dict(header["config"]))
    model.norm = {k: np.asarray(v, dtype=float) for k, v in header["norm"].items()}
    params = {name: p for name, p, _ in model.params()}
    for entry in header["manifest"]:
        name = entry["name"]
        if name not in params:
            raise HeadAlignError(f"{path}: unknown parameter {name!r} in manifest")
        p = params[name]
        raw = data[entry["offset"] : entry["offset"] + entry["nbytes"]]
        arr = np.frombuffer(raw, dtype="<f8").reshape(entry["shape"])
        if arr.shape != p.shape:
            raise ShapeError(f"{path}: {name} shape {arr.shape} != expected {p.shape}")
        p[...] = arr
    return model.eval()
