"""Attitude representations and cyclic-angle arithmetic.

Conventions used throughout the package:

- Navigation frame is NED (North-East-Down); body frame is
  forward-right-down.
- Heading is positive clockwise from North.
- Euler sequence is Z-Y-X (yaw, pitch, roll), so ``C^n_b = Rz @ Ry @ Rx``.
- All angles are radians; degrees appear only at report boundaries.

A direction cosine matrix ``C^x_y`` maps coordinates from frame ``y``
into frame ``x``.  Rotation vectors follow the convention that
``rotvec_to_dcm(phi)`` maps the rotated frame back into the original
one, i.e. it equals the Rodrigues rotation matrix of ``phi``.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import DegenerateAttitudeError, InvalidArgumentError

__all__ = [
    "skew",
    "rotvec_to_dcm",
    "dcm_to_rotvec",
    "quat_to_dcm",
    "dcm_to_quat",
    "rotvec_to_quat",
    "quat_to_rotvec",
    "euler_to_dcm",
    "dcm_to_euler",
    "dcm_to_heading",
    "wrap_angle",
    "angle_diff",
    "is_rotation",
]

#: Rotation angles below this threshold use the 2nd-order Taylor expansion
#: of the Rodrigues coefficients to avoid 0/0.
SMALL_ANGLE = 1e-8


def skew(v: ArrayLike) -> NDArray[np.float64]:
    """Skew-symmetric cross-product matrix, ``skew(v) @ w == cross(v, w)``.

    Parameters
    ----------
    v : array_like, shape (3,)
        Input vector with finite components.

    Returns
    -------
    ndarray, shape (3, 3)
        Antisymmetric matrix.
    """
    v = np.asarray(v, dtype=float)
    if v.shape != (3,) or not np.all(np.isfinite(v)):
        raise InvalidArgumentError(f"skew expects a finite 3-vector, got {v!r}")
    return np.array(
        [
            [0.0, -v[2], v[1]],
            [v[2], 0.0, -v[0]],
            [-v[1], v[0], 0.0],
        ]
    )


def rotvec_to_dcm(phi: ArrayLike) -> NDArray[np.float64]:
    """Rodrigues formula: rotation matrix of the rotation vector ``phi``.

    ``C = I + sin(a)/a [phi x] + (1-cos(a))/a^2 [phi x]^2`` with
    ``a = ||phi||``.  Below ``SMALL_ANGLE`` both coefficients switch to
    their 2nd-order Taylor expansions.

    Parameters
    ----------
    phi : array_like, shape (3,)
        Rotation vector in radians.

    Returns
    -------
    ndarray, shape (3, 3)
        Proper rotation matrix.
    """
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (3,) or not np.all(np.isfinite(phi)):
        raise InvalidArgumentError(f"rotation vector must be a finite 3-vector, got {phi!r}")
    a = np.linalg.norm(phi)
    if a < SMALL_ANGLE:
        s = 1.0 - a * a / 6.0
        c = 0.5 - a * a / 24.0
    else:
        s = np.sin(a) / a
        c = (1.0 - np.cos(a)) / (a * a)
    px = skew(phi)
    return np.eye(3) + s * px + c * (px @ px)


def rotvec_to_quat(phi: ArrayLike) -> NDArray[np.float64]:
    """Unit quaternion ``[s, x, y, z]`` of a rotation vector."""
    phi = np.asarray(phi, dtype=float)
    a = np.linalg.norm(phi)
    if a < SMALL_ANGLE:
        # sin(a/2)/a to 2nd order
        half = 0.5 - a * a / 48.0
    else:
        half = np.sin(a / 2.0) / a
    q = np.empty(4)
    q[0] = np.cos(a / 2.0)
    q[1:] = half * phi
    return _canonical(q / np.linalg.norm(q))


def _canonical(q: NDArray[np.float64]) -> NDArray[np.float64]:
    return -q if q[0] < 0.0 else q


def quat_to_rotvec(q: ArrayLike) -> NDArray[np.float64]:
    """Canonical rotation vector (norm < pi) of a unit quaternion."""
    q = _canonical(np.asarray(q, dtype=float))
    vn = np.linalg.norm(q[1:])
    angle = 2.0 * np.arctan2(vn, q[0])
    if vn < SMALL_ANGLE:
        # angle/sin(angle/2) ~ 2 + angle^2/12 for small angles
        return q[1:] * (2.0 + angle * angle / 12.0)
    return q[1:] * (angle / vn)


def quat_to_dcm(q: ArrayLike) -> NDArray[np.float64]:
    """Rotation matrix of a unit quaternion ``[s, x, y, z]``.

    Uses the standard mapping ``C = (s^2 - |n|^2) I + 2 n n^T + 2 s [n x]``
    so that ``quat_to_dcm(rotvec_to_quat(phi)) == rotvec_to_dcm(phi)``.

    Raises
    ------
    InvalidArgumentError
        If the quaternion norm deviates from 1 by more than 1e-6.
    """
    q = np.asarray(q, dtype=float)
    if q.shape != (4,):
        raise InvalidArgumentError(f"quaternion must have 4 components, got shape {q.shape}")
    n = np.linalg.norm(q)
    if abs(n - 1.0) > 1e-6:
        raise InvalidArgumentError(f"quaternion norm {n!r} deviates from 1 by more than 1e-6")
    q = q / n
    s, e = q[0], q[1:]
    ex = skew(e)
    return (s * s - e @ e) * np.eye(3) + 2.0 * np.outer(e, e) + 2.0 * s * ex


def dcm_to_quat(C: ArrayLike) -> NDArray[np.float64]:
    """Unit quaternion of a rotation matrix (Shepperd's method).

    Numerically stable for all angles including those near pi.
    """
    C = np.asarray(C, dtype=float)
    t = np.trace(C)
    # Pick the largest of (trace, C00, C11, C22) to avoid cancellation.
    choice = int(np.argmax([t, C[0, 0], C[1, 1], C[2, 2]]))
    q = np.empty(4)
    if choice == 0:
        r = np.sqrt(1.0 + t)
        q[0] = 0.5 * r
        q[1] = 0.5 * (C[2, 1] - C[1, 2]) / r
        q[2] = 0.5 * (C[0, 2] - C[2, 0]) / r
        q[3] = 0.5 * (C[1, 0] - C[0, 1]) / r
    else:
        i = choice - 1
        j, k = (i + 1) % 3, (i + 2) % 3
        r = np.sqrt(1.0 + C[i, i] - C[j, j] - C[k, k])
        q[0] = 0.5 * (C[k, j] - C[j, k]) / r
        q[1 + i] = 0.5 * r
        q[1 + j] = 0.5 * (C[j, i] + C[i, j]) / r
        q[1 + k] = 0.5 * (C[k, i] + C[i, k]) / r
    return _canonical(q / np.linalg.norm(q))


def dcm_to_rotvec(C: ArrayLike) -> NDArray[np.float64]:
    """Canonical rotation vector of a rotation matrix.

    Inverse of :func:`rotvec_to_dcm`; goes through the quaternion form,
    which stays well-conditioned for angles near pi.
    """
    return quat_to_rotvec(dcm_to_quat(C))


def euler_to_dcm(yaw: float, pitch: float, roll: float) -> NDArray[np.float64]:
    """Body-to-NED matrix ``C^n_b`` from Z-Y-X Euler angles (radians)."""
    cy, sy = np.cos(yaw), np.sin(yaw)
    cp, sp = np.cos(pitch), np.sin(pitch)
    cr, sr = np.cos(roll), np.sin(roll)
    return np.array(
        [
            [cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr],
            [sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr],
            [-sp, cp * sr, cp * cr],
        ]
    )


def dcm_to_euler(C: ArrayLike) -> tuple[float, float, float]:
    """(yaw, pitch, roll) of a ``C^n_b`` matrix, Z-Y-X sequence."""
    C = np.asarray(C, dtype=float)
    pitch = np.arcsin(np.clip(-C[2, 0], -1.0, 1.0))
    yaw = np.arctan2(C[1, 0], C[0, 0])
    roll = np.arctan2(C[2, 1], C[2, 2])
    return float(yaw), float(pitch), float(roll)


def dcm_to_heading(C: ArrayLike) -> float:
    """Heading angle of a ``C^n_b`` matrix: ``atan2(c21, c11)``.

    Valid for quasi-stationary attitudes with |pitch| well below 90 deg.

    Raises
    ------
    DegenerateAttitudeError
        If the attitude is within ~1e-9 of the gimbal singularity.
    """
    C = np.asarray(C, dtype=float)
    if abs(C[2, 0]) > 1.0 - 1e-9:
        raise DegenerateAttitudeError(
            f"pitch magnitude too close to 90 deg (|c31| = {abs(C[2, 0])!r})"
        )
    return float(np.arctan2(C[1, 0], C[0, 0]))


def wrap_angle(a):
    """Wrap angle(s) to the representative in (-pi, pi]."""
    w = np.arctan2(np.sin(a), np.cos(a))
    # atan2 can return exactly -pi; the canonical representative is +pi.
    if np.ndim(w) == 0:
        return float(np.pi) if w <= -np.pi else float(w)
    w = np.asarray(w)
    w[w <= -np.pi] = np.pi
    return w


def angle_diff(a, b):
    """Wrapped difference ``a - b`` in (-pi, pi], quadrant-aware."""
    return wrap_angle(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))


def is_rotation(C: ArrayLike, tol: float = 1e-9) -> bool:
    """True if ``C`` is orthonormal with determinant +1 within ``tol``."""
    C = np.asarray(C, dtype=float)
    if C.shape != (3, 3):
        return False
    ortho = np.max(np.abs(C.T @ C - np.eye(3))) < tol
    return bool(ortho and abs(np.linalg.det(C) - 1.0) < tol)
