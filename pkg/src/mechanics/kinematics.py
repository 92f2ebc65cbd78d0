import math

import numpy as np

from src.mechanics.PlanarArm import Elbow, JointConfig
from src.shared.errors import ContractError, ReachabilityError


def cumulative_angles(q):
    return np.cumsum(q.angles_rad)


def fk_planar(arm, q):
    """End-effector position (x, y) and orientation: sum of l_i * (cos, sin) of cumulative angles."""
    q.check(arm)
    theta = cumulative_angles(q)
    lengths = np.asarray(arm.link_lengths_m)
    position = np.array([lengths @ np.cos(theta), lengths @ np.sin(theta)])
    return position, float(theta[-1])


def ik_planar3(arm, target, ee_orientation, elbow=Elbow.UP):
    """
    Closed-form inverse kinematics of a 3-link planar arm for a given end-effector orientation.

    The wrist is placed l3 behind the target along ee_orientation; the first two links solve the
    two-link problem on the requested elbow branch and joint 3 completes the orientation.
    """
    if arm.n_links != 3:
        raise ContractError(f"ik_planar3 needs a 3-link arm, got {arm.n_links} links")
    l1, l2, l3 = arm.link_lengths_m
    x, y = float(target[0]), float(target[1])
    wx = x - l3 * math.cos(ee_orientation)
    wy = y - l3 * math.sin(ee_orientation)
    r = math.hypot(wx, wy)

    outer, inner = l1 + l2, abs(l1 - l2)
    tolerance = 1e-12 * outer
    if r > outer + tolerance:
        raise ReachabilityError(f"target ({x}, {y}) is {r - outer:.6g} m beyond reach", r - outer)
    if r < inner - tolerance:
        raise ReachabilityError(f"target ({x}, {y}) is {inner - r:.6g} m inside the dead zone", inner - r)

    c = (r * r - l1 * l1 - l2 * l2) / (2.0 * l1 * l2)
    c = min(1.0, max(-1.0, c))
    q2 = math.acos(c)
    if Elbow(elbow) is Elbow.UP:
        q2 = -q2
    q1 = math.atan2(wy, wx) - math.atan2(l2 * math.sin(q2), l1 + l2 * math.cos(q2))
    q3 = ee_orientation - q1 - q2
    return JointConfig((q1, q2, q3))


def jacobian(arm, q):
    """2 x N positional Jacobian; column j = sum_{i>=j} l_i * (-sin, cos)(theta_i)."""
    q.check(arm)
    theta = cumulative_angles(q)
    lengths = np.asarray(arm.link_lengths_m)
    dx = -lengths * np.sin(theta)
    dy = lengths * np.cos(theta)
    # suffix sums
    return np.vstack([np.cumsum(dx[::-1])[::-1], np.cumsum(dy[::-1])[::-1]])


def link_com_jacobian(arm, q, i):
    """
    Jacobians of the COM of link i: (Jv 2 x N, Jw 1 x N).

    The COM sits at com_fraction * l_i along link i; joints after i do not move it.
    """
    q.check(arm)
    if not 0 <= i < arm.n_links:
        raise ContractError(f"link index {i} out of range")
    theta = cumulative_angles(q)
    lengths = np.array(arm.link_lengths_m)
    lengths[i] *= arm.com_fraction
    lengths[i + 1:] = 0.0
    dx = -lengths * np.sin(theta)
    dy = lengths * np.cos(theta)
    Jv = np.vstack([np.cumsum(dx[::-1])[::-1], np.cumsum(dy[::-1])[::-1]])
    Jw = np.zeros((1, arm.n_links))
    Jw[0, : i + 1] = 1.0
    return Jv, Jw
