import numpy as np
import pytest

from headalign.attitude import (
    angle_diff,
    dcm_to_euler,
    dcm_to_heading,
    dcm_to_quat,
    dcm_to_rotvec,
    euler_to_dcm,
    is_rotation,
    quat_to_dcm,
    quat_to_rotvec,
    rotvec_to_dcm,
    rotvec_to_quat,
    skew,
    wrap_angle,
)
from headalign.errors import DegenerateAttitudeError

from conftest import random_rotation


def quat_rotate(q, v):
    """Rotate v by unit quaternion q via explicit Hamilton products.

    Independent of the DCM conversion under test: p' = q (0, v) q*.
    """
    w, x, y, z = q

    def mul(a, b):
        aw, ax, ay, az = a
        bw, bx, by, bz = b
        return np.array(
            [
                aw * bw - ax * bx - ay * by - az * bz,
                aw * bx + ax * bw + ay * bz - az * by,
                aw * by - ax * bz + ay * bw + az * bx,
                aw * bz + ax * by - ay * bx + az * bw,
            ]
        )

    p = np.array([0.0, v[0], v[1], v[2]])
    conj = np.array([w, -x, -y, -z])
    return mul(mul(q, p), conj)[1:]


def test_skew_reproduces_cross_product():
    rng = np.random.default_rng(1)
    for _ in range(20):
        v, w = rng.normal(size=3), rng.normal(size=3)
        np.testing.assert_allclose(skew(v) @ w, np.cross(v, w), atol=1e-15)


def test_skew_is_antisymmetric():
    s = skew([1.0, 2.0, 3.0])
    np.testing.assert_array_equal(s, -s.T)
    assert s[0, 1] == -3.0 and s[0, 2] == 2.0 and s[1, 2] == -1.0


@pytest.mark.parametrize(
    "phi, expected",
    [
        ([0.0, 0.0, 0.0], np.eye(3)),
        # quarter turn about z maps x to y
        ([0.0, 0.0, np.pi / 2], np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])),
        ([np.pi, 0.0, 0.0], np.diag([1.0, -1.0, -1.0])),
    ],
)
def test_rotvec_to_dcm_known_rotations(phi, expected):
    np.testing.assert_allclose(rotvec_to_dcm(phi), expected, atol=1e-15)


def test_rotvec_to_dcm_matches_quaternion_rotation():
    # two independent formula paths must agree on rotated vectors
    rng = np.random.default_rng(2)
    for _ in range(50):
        phi = rng.normal(size=3) * rng.uniform(0.0, 3.0)
        q = rotvec_to_quat(phi)
        C = rotvec_to_dcm(phi)
        v = rng.normal(size=3)
        np.testing.assert_allclose(C @ v, quat_rotate(q, v), atol=1e-12)


def test_rotvec_to_quat_half_angle_form():
    phi = np.array([0.3, -0.4, 0.5])
    a = np.linalg.norm(phi)
    expected = np.concatenate([[np.cos(a / 2)], np.sin(a / 2) * phi / a])
    np.testing.assert_allclose(rotvec_to_quat(phi), expected, atol=1e-15)


def test_quat_dcm_round_trip_shepperd_branches():
    # 180 deg rotations exercise every branch of the quaternion extraction
    axes = [
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [1.0, 1.0, 0.0],
        [0.0, 1.0, 1.0],
        [1.0, 0.0, 1.0],
        [1.0, 1.0, 1.0],
    ]
    for ax in axes:
        phi = np.pi * np.asarray(ax) / np.linalg.norm(ax)
        C = rotvec_to_dcm(phi)
        np.testing.assert_allclose(quat_to_dcm(dcm_to_quat(C)), C, atol=1e-13)


def test_rotvec_round_trip_small_and_near_pi_angles():
    rng = np.random.default_rng(3)
    for scale in (1e-14, 1e-9, 1e-4, 1.0, np.pi - 1e-9, np.pi - 1e-13):
        for _ in range(25):
            u = rng.normal(size=3)
            u /= np.linalg.norm(u)
            phi = scale * u
            back = dcm_to_rotvec(rotvec_to_dcm(phi))
            assert np.linalg.norm(back - phi) < 1e-10


def test_quat_rotvec_round_trip():
    # the extraction canonicalizes to the principal rotation (angle <= pi)
    rng = np.random.default_rng(4)
    for _ in range(100):
        u = rng.normal(size=3)
        phi = u / np.linalg.norm(u) * rng.uniform(0.0, np.pi - 1e-6)
        q = rotvec_to_quat(phi)
        np.testing.assert_allclose(quat_to_rotvec(q), phi, atol=1e-12)
        # sign flip maps to the same rotation
        np.testing.assert_allclose(quat_to_rotvec(-q), phi, atol=1e-12)


def test_euler_to_dcm_single_axis():
    np.testing.assert_allclose(
        euler_to_dcm(np.pi / 2, 0.0, 0.0),
        [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]],
        atol=1e-15,
    )
    np.testing.assert_allclose(
        euler_to_dcm(0.0, 0.0, np.pi / 2),
        [[1.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]],
        atol=1e-15,
    )


def test_euler_to_dcm_is_zyx_composition():
    yaw, pitch, roll = 0.4, -0.3, 1.1
    Rz = rotvec_to_dcm([0.0, 0.0, yaw])
    Ry = rotvec_to_dcm([0.0, pitch, 0.0])
    Rx = rotvec_to_dcm([roll, 0.0, 0.0])
    np.testing.assert_allclose(euler_to_dcm(yaw, pitch, roll), Rz @ Ry @ Rx, atol=1e-14)


def test_euler_round_trip():
    rng = np.random.default_rng(5)
    for _ in range(200):
        yaw = rng.uniform(-np.pi, np.pi)
        pitch = rng.uniform(-np.pi / 2 + 0.01, np.pi / 2 - 0.01)
        roll = rng.uniform(-np.pi, np.pi)
        y, p, r = dcm_to_euler(euler_to_dcm(yaw, pitch, roll))
        np.testing.assert_allclose([y, p, r], [yaw, pitch, roll], atol=1e-12)


def test_dcm_to_heading_matches_yaw():
    psi = np.deg2rad(123.0)
    C = euler_to_dcm(psi, np.deg2rad(3.0), np.deg2rad(-2.0))
    assert dcm_to_heading(C) == pytest.approx(psi, abs=1e-14)


def test_dcm_to_heading_rejects_gimbal_lock():
    C = euler_to_dcm(0.2, np.pi / 2, 0.0)
    with pytest.raises(DegenerateAttitudeError):
        dcm_to_heading(C)


@pytest.mark.parametrize(
    "a, expected",
    [
        (0.0, 0.0),
        (np.pi, np.pi),
        (-np.pi, np.pi),
        (3 * np.pi / 2, -np.pi / 2),
        (-3 * np.pi / 2, np.pi / 2),
        (2 * np.pi, 0.0),
    ],
)
def test_wrap_angle_representatives(a, expected):
    assert wrap_angle(a) == pytest.approx(expected, abs=1e-12)


def test_wrap_angle_array():
    out = wrap_angle(np.array([0.0, 4 * np.pi, -np.pi]))
    np.testing.assert_allclose(out, [0.0, 0.0, np.pi], atol=1e-12)


def test_angle_diff_quadrant_aware():
    a = np.deg2rad(350.0)
    b = np.deg2rad(10.0)
    assert angle_diff(a, b) == pytest.approx(np.deg2rad(-20.0), abs=1e-12)
    assert angle_diff(b, a) == pytest.approx(np.deg2rad(20.0), abs=1e-12)


def test_is_rotation():
    assert is_rotation(np.eye(3))
    assert not is_rotation(2.0 * np.eye(3))
    assert not is_rotation(np.diag([1.0, 1.0, -1.0]))  # reflection
    assert not is_rotation(np.eye(4))
    rng = np.random.default_rng(6)
    for _ in range(10):
        assert is_rotation(random_rotation(rng), tol=1e-12)
