"""One-step unicycle motion toward a waypoint under velocity limits."""

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class KinematicLimits:
    v_max: float    # m/s
    phi_max: float  # rad/s


def wrap_angle(a: float) -> float:
    """Normalize to (-pi, pi]."""
    a = math.fmod(a, 2.0 * math.pi)
    if a > math.pi:
        a -= 2.0 * math.pi
    elif a <= -math.pi:
        a += 2.0 * math.pi
    return a


def step_toward(x: float, y: float, theta: float, wx: float, wy: float,
                limits: KinematicLimits):
    """Rotate-and-advance unicycle step (dt = 1 s).

    Turns toward the waypoint by at most phi_max. Advances along the new
    heading only when the pre-clamp bearing error is within pi/2, by at most
    v_max and never past the waypoint; otherwise rotates in place.
    """
    dx = wx - x
    dy = wy - y
    dist = math.hypot(dx, dy)
    if dist == 0.0:
        return x, y, theta
    bearing = math.atan2(dy, dx)
    err = wrap_angle(bearing - theta)
    turn = max(-limits.phi_max, min(limits.phi_max, err))
    theta = wrap_angle(theta + turn)
    if abs(err) <= math.pi / 2.0:
        step = min(limits.v_max, dist)
        x += step * math.cos(theta)
        y += step * math.sin(theta)
    return x, y, theta


def holonomic_step(x: float, y: float, theta: float, wx: float, wy: float,
                   limits: KinematicLimits):
    """Ablation motion model: straight toward the waypoint at up to v_max."""
    dx = wx - x
    dy = wy - y
    dist = math.hypot(dx, dy)
    if dist == 0.0:
        return x, y, theta
    step = min(limits.v_max, dist)
    return x + step * dx / dist, y + step * dy / dist, math.atan2(dy, dx)
