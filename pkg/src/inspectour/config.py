"""Vehicle, sensor and mission configuration records.

Defaults match the small-scenario simulation setup: 3 m/s travel,
1 m/s inspection, 0.5 rad/s yaw rate, 65 deg x 65 deg field of view
and a 1800 s endurance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class VehicleConfig:
    v_travel: float = 3.0
    v_inspect: float = 1.0
    yaw_rate_max: float = 0.5

    def __post_init__(self) -> None:
        for name in ("v_travel", "v_inspect", "yaw_rate_max"):
            value = getattr(self, name)
            if not (value > 0.0):
                raise ValueError(f"{name} must be > 0, got {value}")


@dataclass(frozen=True)
class SensorConfig:
    """Camera model: rectangular FoV pyramid, usable depth range, fixed pitch.

    camera_pitch is the elevation of the optical axis (0 = horizontal,
    positive tilts up). incidence_max bounds the angle between the optical
    axis and the face anti-normal for a face to count as inspectable.
    """

    fov_h: float = math.radians(65.0)
    fov_v: float = math.radians(65.0)
    range_min: float = 1.0
    range_max: float = 30.0
    camera_pitch: float = 0.0
    incidence_max: float = math.radians(60.0)

    def __post_init__(self) -> None:
        if not (0.0 < self.fov_h < math.pi):
            raise ValueError(f"fov_h must be in (0, pi), got {self.fov_h}")
        if not (0.0 < self.fov_v < math.pi):
            raise ValueError(f"fov_v must be in (0, pi), got {self.fov_v}")
        if not (0.0 < self.range_min < self.range_max):
            raise ValueError(
                f"need 0 < range_min < range_max, got [{self.range_min}, {self.range_max}]")
        if not (0.0 < self.incidence_max <= math.pi / 2):
            raise ValueError(f"incidence_max must be in (0, pi/2], got {self.incidence_max}")


@dataclass(frozen=True)
class MissionConfig:
    """Mission-level knobs: time budget, route topology, sampling effort."""

    t_max: float = 1800.0
    closed_route: bool = True
    iterations: int = 30
    rng_seed: int = 0
    include_probability: float = 0.5

    def __post_init__(self) -> None:
        if not (self.t_max > 0.0):
            raise ValueError(f"t_max must be > 0, got {self.t_max}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if not (0.0 < self.include_probability <= 1.0):
            raise ValueError(
                f"include_probability must be in (0, 1], got {self.include_probability}")
