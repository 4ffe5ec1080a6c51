"""Recording container and on-disk round-trip.

A recording is a directory of four files:

- ``imu.csv``: ``t,wx,wy,wz,fx,fy,fz`` (s, rad/s, m/s^2)
- ``aid.csv``: ``t,lat,lon,heading_gt``(s, rad, rad, rad)
- ``truth.csv``: ``t,roll,pitch,yaw`` (s, rad), dense at IMU rate
- ``meta.json``: scenario config, sensor spec, seed, format version "1"

Floats are written with 17 significant digits so the round trip is
bit-exact for IEEE doubles.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import InvalidArgumentError, RecordingFormatError
from .strapdown import AidData, ImuData

__all__ = ["TruthTrack", "Recording", "write_recording", "read_recording"]

FORMAT_VERSION = "1"

_IMU_HEADER = "t,wx,wy,wz,fx,fy,fz"
_AID_HEADER = "t,lat,lon,heading_gt"
_TRUTH_HEADER = "t,roll,pitch,yaw"

#: Sample spacing may deviate from nominal by at most this (seconds).
RATE_TOL = 1e-6


@dataclass
class TruthTrack:
    """Dense ground-truth attitude at IMU rate: Euler angles in radians,
    columns (roll, pitch, yaw)."""

    t: NDArray[np.float64]
    euler: NDArray[np.float64]

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.euler = np.asarray(self.euler, dtype=float)
        if self.euler.shape != (self.t.size, 3):
            raise InvalidArgumentError("euler must be (n, 3) matching t")

    def __len__(self) -> int:
        return self.t.size

    @property
    def heading(self) -> NDArray[np.float64]:
        return self.euler[:, 2]


@dataclass
class Recording:
    """One time-aligned dataset unit: IMU stream, aiding stream, dense
    ground-truth attitude, and the metadata that produced them."""

    imu: ImuData
    aid: AidData
    truth: TruthTrack
    meta: dict

    def __post_init__(self):
        if abs(self.imu.t[0] - self.aid.t[0]) > 1e-9:
            raise InvalidArgumentError("IMU and aiding streams must start together")
        if self.truth.t.size != self.imu.t.size or np.max(np.abs(self.truth.t - self.imu.t)) > 1e-9:
            raise InvalidArgumentError("truth track must be sampled on the IMU time grid")

    @property
    def duration(self) -> float:
        return float(self.imu.t[-1] - self.imu.t[0])

    def slice_window(self, t_start: float, t_end: float) -> "Recording":
        """Sub-recording over ``[t_start, t_end]`` (inclusive grid bounds)."""
        imu = self.imu.slice_window(t_start, t_end)
        aid = self.aid.slice_window(t_start, t_end)
        m = (self.truth.t >= t_start - 1e-9) & (self.truth.t <= t_end + 1e-9)
        return Recording(imu, aid, TruthTrack(self.truth.t[m], self.truth.euler[m]), self.meta)


def _fmt_row(values) -> str:
    return ",".join(f"{v:.17g}" for v in values)


def _write_csv(path: str, header: str, columns: list[NDArray[np.float64]]) -> None:
    n = len(columns[0])
    with open(path, "w", newline="\n") as fh:
        fh.write(header + "\n")
        for i in range(n):
            fh.write(_fmt_row(col[i] for col in columns) + "\n")


def _read_csv(path: str, header: str) -> NDArray[np.float64]:
    name = os.path.basename(path)
    ncol = len(header.split(","))
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise RecordingFormatError(f"{name}: {exc}") from exc
    with fh:
        first = fh.readline()
        if first.rstrip("\r\n") != header:
            raise RecordingFormatError(
                f"{name} line 1: expected header {header!r}, got {first.rstrip()!r}"
            )
        rows: list[list[float]] = []
        for lineno, line in enumerate(fh, start=2):
            fields = line.rstrip("\r\n").split(",")
            if len(fields) != ncol:
                raise RecordingFormatError(
                    f"{name} line {lineno}: expected {ncol} fields, got {len(fields)}"
                )
            try:
                rows.append([float(v) for v in fields])
            except ValueError as exc:
                raise RecordingFormatError(f"{name} line {lineno}: {exc}") from exc
    if not rows:
        raise RecordingFormatError(f"{name}: no data rows")
    data = np.array(rows, dtype=float)
    bad = np.nonzero(np.diff(data[:, 0]) <= 0)[0]
    if bad.size:
        raise RecordingFormatError(
            f"{name} line {bad[0] + 3}: non-increasing timestamp"
        )
    return data


def write_recording(rec: Recording, path: str) -> None:
    """Write a recording to directory ``path`` (created if needed)."""
    os.makedirs(path, exist_ok=True)
    _write_csv(
        os.path.join(path, "imu.csv"),
        _IMU_HEADER,
        [rec.imu.t] + [rec.imu.omega[:, j] for j in range(3)] + [rec.imu.f[:, j] for j in range(3)],
    )
    _write_csv(
        os.path.join(path, "aid.csv"),
        _AID_HEADER,
        [rec.aid.t, rec.aid.lat, rec.aid.lon, rec.aid.heading_gt],
    )
    _write_csv(
        os.path.join(path, "truth.csv"),
        _TRUTH_HEADER,
        [rec.truth.t] + [rec.truth.euler[:, j] for j in range(3)],
    )
    meta = dict(rec.meta)
    meta.setdefault("version", FORMAT_VERSION)
    with open(os.path.join(path, "meta.json"), "w", newline="\n") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _check_rate(name: str, t: NDArray[np.float64], rate: float) -> None:
    if t.size < 2:
        return
    dt = np.diff(t)
    worst = np.max(np.abs(dt - 1.0 / rate))
    if worst > RATE_TOL:
        raise RecordingFormatError(
            f"{name}: sample spacing off nominal 1/{rate:g} s by {worst:.3g} s"
        )


def read_recording(path: str) -> Recording:
    """Read and validate a recording directory.

    Raises
    ------
    RecordingFormatError
        On malformed rows (with line numbers), non-monotone time, rate
        mismatch, or aiding timestamps that are not a subset of the IMU
        grid.  No partial recording is ever returned.
    """
    meta_path = os.path.join(path, "meta.json")
    try:
        with open(meta_path) as fh:
            meta = json.load(fh)
    except OSError as exc:
        raise RecordingFormatError(f"meta.json: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise RecordingFormatError(f"meta.json line {exc.lineno}: {exc.msg}") from exc
    if meta.get("version") != FORMAT_VERSION:
        raise RecordingFormatError(
            f"meta.json: unsupported format version {meta.get('version')!r}"
        )

    imu_tab = _read_csv(os.path.join(path, "imu.csv"), _IMU_HEADER)
    aid_tab = _read_csv(os.path.join(path, "aid.csv"), _AID_HEADER)
    truth_tab = _read_csv(os.path.join(path, "truth.csv"), _TRUTH_HEADER)

    scenario = meta.get("scenario", {})
    imu_rate = float(scenario.get("imu_rate", 100.0))
    aid_rate = float(scenario.get("aid_rate", 5.0))
    _check_rate("imu.csv", imu_tab[:, 0], imu_rate)
    _check_rate("aid.csv", aid_tab[:, 0], aid_rate)

    ratio = int(round(imu_rate / aid_rate))
    sub = imu_tab[::ratio, 0][: aid_tab.shape[0]]
    if sub.size != aid_tab.shape[0] or np.max(np.abs(sub - aid_tab[:, 0])) > 1e-9:
        raise RecordingFormatError(
            "aid.csv: aiding timestamps are not every "
            f"{ratio}th IMU timestamp"
        )
    if truth_tab.shape[0] != imu_tab.shape[0]:
        raise RecordingFormatError("truth.csv: row count differs from imu.csv")

    try:
        return Recording(
            imu=ImuData(imu_tab[:, 0], imu_tab[:, 1:4], imu_tab[:, 4:7]),
            aid=AidData(aid_tab[:, 0], aid_tab[:, 1], aid_tab[:, 2], aid_tab[:, 3]),
            truth=TruthTrack(truth_tab[:, 0], truth_tab[:, 1:4]),
            meta=meta,
        )
    except InvalidArgumentError as exc:
        raise RecordingFormatError(str(exc)) from exc
