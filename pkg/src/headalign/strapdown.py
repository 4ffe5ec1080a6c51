"""Navigation-frame reference models, frame-track integration, and
observation-vector construction.

The alignment decomposition tracks two time-varying frames from the
start of the window: ``C^{b0}_b(t)`` integrated from gyro rates at the
IMU rate, and ``C^{n0}_n(t)`` integrated from the Earth-rate model at
the aiding rate.  Gravity-derived observation vector pairs are then
formed either by temporal integration or instantaneously.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .attitude import rotvec_to_dcm
from .errors import AlignmentWindowError, InsufficientDataError, InvalidArgumentError

__all__ = [
    "EARTH_RATE",
    "ImuData",
    "AidData",
    "ObservationSeries",
    "earth_rate_nav",
    "gravity_nav",
    "integrate_body_frame",
    "integrate_nav_frame",
    "observation_integrated",
    "observation_instantaneous",
]

#: Earth rotation rate, rad/s.
EARTH_RATE = 7.292115e-5

#: Maximum allowed skew when pairing aiding samples to body samples.
MAX_PAIRING_SKEW = 0.010

#: Frame-track chaining re-orthonormalizes every this many steps.
RENORM_INTERVAL = 1000


@dataclass
class ImuData:
    """Gyro/accelerometer stream: ``t`` (s), ``omega`` rad/s, ``f`` m/s^2."""

    t: NDArray[np.float64]
    omega: NDArray[np.float64]
    f: NDArray[np.float64]

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.omega = np.asarray(self.omega, dtype=float)
        self.f = np.asarray(self.f, dtype=float)
        if self.omega.shape != (self.t.size, 3) or self.f.shape != (self.t.size, 3):
            raise InvalidArgumentError("omega and f must be (n, 3) arrays matching t")
        if self.t.size >= 2 and np.any(np.diff(self.t) <= 0):
            raise InvalidArgumentError("IMU timestamps must be strictly increasing")

    def __len__(self) -> int:
        return self.t.size

    def slice_window(self, t_start: float, t_end: float) -> "ImuData":
        m = (self.t >= t_start - 1e-9) & (self.t <= t_end + 1e-9)
        return ImuData(self.t[m], self.omega[m], self.f[m])


@dataclass
class AidData:
    """Aiding stream: ``t`` (s), ``lat``/``lon`` rad, ``heading_gt`` rad."""

    t: NDArray[np.float64]
    lat: NDArray[np.float64]
    lon: NDArray[np.float64]
    heading_gt: NDArray[np.float64]

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.lat = np.asarray(self.lat, dtype=float)
        self.lon = np.asarray(self.lon, dtype=float)
        self.heading_gt = np.asarray(self.heading_gt, dtype=float)
        n = self.t.size
        for name in ("lat", "lon", "heading_gt"):
            if getattr(self, name).shape != (n,):
                raise InvalidArgumentError(f"{name} must match t in length")
        if n >= 2 and np.any(np.diff(self.t) <= 0):
            raise InvalidArgumentError("aiding timestamps must be strictly increasing")
        if np.any(np.abs(self.lat) > np.pi / 2):
            raise InvalidArgumentError("latitude out of [-pi/2, pi/2]")

    def __len__(self) -> int:
        return self.t.size

    def slice_window(self, t_start: float, t_end: float) -> "AidData":
        m = (self.t >= t_start - 1e-9) & (self.t <= t_end + 1e-9)
        return AidData(self.t[m], self.lat[m], self.lon[m], self.heading_gt[m])


@dataclass
class ObservationSeries:
    """Paired observation vectors in the frozen b0 and n0 frames.

    ``form`` is ``"integrated"`` (units m/s, zero at the window start) or
    ``"instantaneous"`` (units m/s^2).
    """

    times: NDArray[np.float64]
    u_b0: NDArray[np.float64]
    u_n0: NDArray[np.float64]
    form: str

    def __post_init__(self):
        if not (len(self.times) == len(self.u_b0) == len(self.u_n0)):
            raise InvalidArgumentError("observation series lengths differ")
        if self.form not in ("integrated", "instantaneous"):
            raise InvalidArgumentError(f"unknown observation form {self.form!r}")

    def __len__(self) -> int:
        return len(self.times)


def earth_rate_nav(lat: float, omega: float = EARTH_RATE) -> NDArray[np.float64]:
    """Earth rotation rate in NED at latitude ``lat`` (quasi-stationary,
    so the craft-rate contribution is zero).

    Returns ``[omega cos(lat), 0, -omega sin(lat)]``.
    """
    if not np.isfinite(lat) or abs(lat) > np.pi / 2:
        raise InvalidArgumentError(f"latitude {lat!r} out of [-pi/2, pi/2]")
    return np.array([omega * np.cos(lat), 0.0, -omega * np.sin(lat)])


def gravity_nav(lat: float) -> NDArray[np.float64]:
    """Local gravity vector in NED (Down-positive), Somigliana model."""
    if not np.isfinite(lat) or abs(lat) > np.pi / 2:
        raise InvalidArgumentError(f"latitude {lat!r} out of [-pi/2, pi/2]")
    s2 = np.sin(lat) ** 2
    g = 9.7803253359 * (1.0 + 0.00193185265241 * s2) / np.sqrt(1.0 - 0.00669437999013 * s2)
    return np.array([0.0, 0.0, g])


def _step_dcms(dphi: NDArray[np.float64]) -> NDArray[np.float64]:
    """Vectorized Rodrigues formula over a batch of small rotation vectors."""
    a = np.linalg.norm(dphi, axis=1)
    small = a < 1e-8
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(small, 1.0 - a * a / 6.0, np.sin(a) / np.where(small, 1.0, a))
        c = np.where(small, 0.5 - a * a / 24.0, (1.0 - np.cos(a)) / np.where(small, 1.0, a * a))
    n = dphi.shape[0]
    px = np.zeros((n, 3, 3))
    px[:, 0, 1] = -dphi[:, 2]
    px[:, 0, 2] = dphi[:, 1]
    px[:, 1, 0] = dphi[:, 2]
    px[:, 1, 2] = -dphi[:, 0]
    px[:, 2, 0] = -dphi[:, 1]
    px[:, 2, 1] = dphi[:, 0]
    return np.eye(3) + s[:, None, None] * px + c[:, None, None] * (px @ px)


def _chain(step_dcms: NDArray[np.float64]) -> NDArray[np.float64]:
    """Chain per-step rotations into a frame track starting at identity."""
    n = step_dcms.shape[0] + 1
    out = np.empty((n, 3, 3))
    out[0] = np.eye(3)
    C = np.eye(3)
    for k in range(1, n):
        C = C @ step_dcms[k - 1]
        if k % RENORM_INTERVAL == 0:
            # first-order symmetric orthonormalization
            C = C @ (1.5 * np.eye(3) - 0.5 * (C.T @ C))
        out[k] = C
    return out


def integrate_body_frame(t: ArrayLike, omega: ArrayLike) -> NDArray[np.float64]:
    """Integrate gyro rates into the body frame track ``C^{b0}_b(t_k)``.

    Per-step rotation vector is the trapezoidal increment plus the
    two-sample coning correction ``cross(dtheta_{k-1}, dtheta_k) / 12``.
    The first element is the identity.

    Parameters
    ----------
    t : array_like, shape (n,)
        Strictly increasing sample times, seconds.
    omega : array_like, shape (n, 3)
        Angular rate samples, rad/s.

    Returns
    -------
    ndarray, shape (n, 3, 3)
    """
    t = np.asarray(t, dtype=float)
    omega = np.asarray(omega, dtype=float)
    if t.size < 2:
        raise InsufficientDataError("body-frame integration needs at least 2 samples")
    dt = np.diff(t)[:, None]
    dtheta = 0.5 * (omega[:-1] + omega[1:]) * dt
    dphi = dtheta.copy()
    dphi[1:] += np.cross(dtheta[:-1], dtheta[1:]) / 12.0
    return _chain(_step_dcms(dphi))


def integrate_nav_frame(
    t: ArrayLike, lat: ArrayLike, omega: float = EARTH_RATE
) -> NDArray[np.float64]:
    """Integrate the Earth-rate model into the nav frame track ``C^{n0}_n(t_k)``.

    Same chaining scheme as the body side but driven by
    ``earth_rate_nav(lat(t))`` and without a coning term.  ``omega`` is a
    test hook: setting it to 0 yields identity tracks.
    """
    t = np.asarray(t, dtype=float)
    lat = np.asarray(lat, dtype=float)
    if t.size < 2:
        raise InsufficientDataError("nav-frame integration needs at least 2 samples")
    w = np.stack(
        [omega * np.cos(lat), np.zeros_like(lat), -omega * np.sin(lat)], axis=1
    )
    dt = np.diff(t)[:, None]
    dtheta = 0.5 * (w[:-1] + w[1:]) * dt
    return _chain(_step_dcms(dtheta))


def _pair_indices(imu_t: NDArray[np.float64], aid_t: NDArray[np.float64]) -> NDArray[np.intp]:
    """Index of the nearest preceding body sample for each aiding time."""
    if aid_t[0] < imu_t[0] - 1e-9 or aid_t[-1] > imu_t[-1] + MAX_PAIRING_SKEW:
        raise AlignmentWindowError(
            f"aiding range [{aid_t[0]}, {aid_t[-1]}] not covered by "
            f"IMU range [{imu_t[0]}, {imu_t[-1]}]"
        )
    idx = np.searchsorted(imu_t, aid_t + 1e-9, side="right") - 1
    skew = aid_t - imu_t[idx]
    if np.any(skew > MAX_PAIRING_SKEW + 1e-9):
        k = int(np.argmax(skew))
        raise AlignmentWindowError(
            f"aiding sample at t={aid_t[k]} is {skew[k]:.4f}s after the nearest "
            f"body sample (max allowed {MAX_PAIRING_SKEW}s)"
        )
    return idx


def _check_tracks(imu: ImuData, aid: AidData, body_track, nav_track):
    if body_track.shape != (len(imu), 3, 3):
        raise AlignmentWindowError(
            f"body track length {body_track.shape[0]} does not match IMU length {len(imu)}"
        )
    if nav_track.shape != (len(aid), 3, 3):
        raise AlignmentWindowError(
            f"nav track length {nav_track.shape[0]} does not match aiding length {len(aid)}"
        )


def _cumtrapz(y: NDArray[np.float64], t: NDArray[np.float64]) -> NDArray[np.float64]:
    out = np.zeros_like(y)
    out[1:] = np.cumsum(0.5 * (y[:-1] + y[1:]) * np.diff(t)[:, None], axis=0)
    return out


def observation_integrated(
    imu: ImuData,
    aid: AidData,
    body_track: NDArray[np.float64],
    nav_track: NDArray[np.float64],
) -> ObservationSeries:
    """Integrated observation vectors at the aiding timestamps.

    ``u_b0(t) = -int C^{b0}_b f^b dtau`` (trapezoidal at the IMU rate,
    then sampled at aiding times) and ``u_n0(t) = int C^{n0}_n g^n dtau``
    (trapezoidal at the aiding rate).  Gravity is held constant over the
    window, evaluated at the first aiding sample.
    """
    _check_tracks(imu, aid, body_track, nav_track)
    g_n = gravity_nav(aid.lat[0])
    y_b = -np.einsum("kij,kj->ki", body_track, imu.f)
    u_b_full = _cumtrapz(y_b, imu.t)
    idx = _pair_indices(imu.t, aid.t)
    y_n = nav_track @ g_n
    u_n = _cumtrapz(y_n, aid.t)
    return ObservationSeries(aid.t.copy(), u_b_full[idx], u_n, "integrated")


def observation_instantaneous(
    imu: ImuData,
    aid: AidData,
    body_track: NDArray[np.float64],
    nav_track: NDArray[np.float64],
) -> ObservationSeries:
    """Instantaneous observation vectors at the aiding timestamps.

    ``u_b0(t_k) = -C^{b0}_b(t_k) f^b(t_k)`` and
    ``u_n0(t_k) = C^{n0}_n(t_k) g^n``.
    """
    _check_tracks(imu, aid, body_track, nav_track)
    g_n = gravity_nav(aid.lat[0])
    idx = _pair_indices(imu.t, aid.t)
    u_b = -np.einsum("kij,kj->ki", body_track[idx], imu.f[idx])
    u_n = nav_track @ g_n
    return ObservationSeries(aid.t.copy(), u_b, u_n, "instantaneous")
