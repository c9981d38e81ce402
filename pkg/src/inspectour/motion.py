"""Two-state straight-line motion for a rotorcraft.

Position moves on the straight segment while yaw turns along the shortest
arc; both happen simultaneously, so a segment's execution time is the max
of the translation time and the yaw time.
"""

from __future__ import annotations

from dataclasses import dataclass

from .geometry import Pose, angular_distance, normalize_yaw


def interpolate(xi0: Pose, xi1: Pose, s: float) -> Pose:
    """Pose at fraction s in [0, 1] along the straight segment xi0 -> xi1.

    Positions are linear in s; yaw follows the shortest angular arc and is
    renormalized. Endpoints are returned exactly.
    """
    if not (0.0 <= s <= 1.0):
        raise ValueError(f"interpolation fraction must be in [0, 1], got {s}")
    if s == 0.0:
        return xi0
    if s == 1.0:
        return xi1
    dpsi = normalize_yaw(xi1.psi - xi0.psi)
    return Pose(
        xi0.x + s * (xi1.x - xi0.x),
        xi0.y + s * (xi1.y - xi0.y),
        xi0.z + s * (xi1.z - xi0.z),
        normalize_yaw(xi0.psi + s * dpsi),
    )


def travel_time(xi_i: Pose, xi_j: Pose, speed: float, yaw_rate_max: float) -> float:
    """Execution time of the segment xi_i -> xi_j under speed and yaw-rate caps.

    max(distance / speed, yaw_distance / yaw_rate_max), with the yaw
    distance measured along the shortest arc in [0, pi]. Symmetric in its
    pose arguments.
    """
    if not (speed > 0.0):
        raise ValueError(f"speed must be > 0, got {speed}")
    if not (yaw_rate_max > 0.0):
        raise ValueError(f"yaw_rate_max must be > 0, got {yaw_rate_max}")
    translation = xi_i.distance_to(xi_j) / speed
    rotation = angular_distance(xi_i.psi, xi_j.psi) / yaw_rate_max
    return max(translation, rotation)


@dataclass(frozen=True)
class TimedSegment:
    """One straight flight segment with its execution time."""

    start: Pose
    end: Pose
    duration: float
    speed_limit_used: float

    @classmethod
    def connect(cls, start: Pose, end: Pose, speed: float,
                yaw_rate_max: float) -> "TimedSegment":
        return cls(start, end, travel_time(start, end, speed, yaw_rate_max), speed)
