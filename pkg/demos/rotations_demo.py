#!/usr/bin/env python3
"""Tour of the rotation toolbox: representations and gyro integration."""

import numpy as np

from headalign.attitude import (
    dcm_to_quat,
    euler_to_dcm,
    quat_to_rotvec,
    rotvec_to_dcm,
    rotvec_to_quat,
)
from headalign.strapdown import integrate_body_frame

# a boat-like attitude: yaw 75 deg, pitch 1.2 deg, roll -1.5 deg
C = euler_to_dcm(np.deg2rad(75.0), np.deg2rad(1.2), np.deg2rad(-1.5))
q = dcm_to_quat(C)
rv = quat_to_rotvec(q)

print("DCM:")
print(np.array_str(C, precision=6, suppress_small=True))
print("quaternion:", np.array_str(q, precision=6))
print("rotation vector (deg):", np.array_str(np.degrees(rv), precision=4))

# closure: every representation converts back to the same matrix
err_q = np.abs(rotvec_to_dcm(quat_to_rotvec(rotvec_to_quat(rv))) - C).max()
print(f"round-trip closure error: {err_q:.3e}")

# classic integrator stress test: a fast cone wobble.  The body axes
# trace a cone, and although the gyro signal averages to zero the
# attitude drifts about the cone axis at half the solid-angle rate.
a = 0.01
om = 2.0 * np.pi * 4.0
rate = 100.0
t = np.arange(0, 2001) / rate
omega_b = a * om * np.stack([np.cos(om * t), np.sin(om * t), np.zeros_like(t)], axis=1)

track = integrate_body_frame(t, omega_b)
drift = quat_to_rotvec(dcm_to_quat(track[-1]))
print(f"measured cone drift about z: {drift[2]:+.4e} rad over {t[-1]:.0f} s")
print(f"analytic a^2*Omega/2 * T:    {a * a * om / 2 * t[-1]:+.4e} rad")
