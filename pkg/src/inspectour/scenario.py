"""Randomized placement of archetype structures in a bounded area.

Reproduces the simulation protocol: N structures drawn from a small set
of archetype meshes, dropped at random non-overlapping ground positions
with random yaw inside planar bounds. Four procedural archetypes of
distinct scale and face count are built in; external meshes can be used
instead through the scenario document loader.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .config import MissionConfig, SensorConfig, VehicleConfig
from .geometry import Structure, TriMesh

PLACEMENT_ATTEMPTS = 10000
DEFAULT_MARGIN = 5.0


class PlacementError(RuntimeError):
    """Raised when a structure cannot be placed without overlap."""


@dataclass(frozen=True)
class Archetype:
    name: str
    mesh: TriMesh
    weight: float = 1.0


@dataclass(frozen=True)
class Scenario:
    """A full problem instance: structures plus vehicle/sensor/mission setup."""

    structures: tuple[Structure, ...]
    bounds: tuple[float, float, float]
    vehicle: VehicleConfig
    sensor: SensorConfig
    mission: MissionConfig
    margin: float = DEFAULT_MARGIN

    def structure(self, sid: str) -> Structure:
        for s in self.structures:
            if s.id == sid:
                return s
        raise KeyError(sid)

    def with_mission(self, mission: MissionConfig) -> "Scenario":
        return replace(self, mission=mission)


def _quads_to_mesh(vertices: list[tuple[float, float, float]],
                   quads: list[tuple[int, int, int, int]]) -> TriMesh:
    faces = []
    for a, b, c, d in quads:
        faces.append((a, b, c))
        faces.append((a, c, d))
    return TriMesh(vertices, faces)


def _panel_array() -> TriMesh:
    """Rows of tilted rectangular panels; the 'solar farm' stand-in."""
    tilt = math.radians(60.0)
    width, depth, base = 4.0, 2.0, 0.5
    dy = depth * math.cos(tilt)
    dz = depth * math.sin(tilt)
    vertices: list[tuple[float, float, float]] = []
    quads: list[tuple[int, int, int, int]] = []
    for row in range(2):
        y0 = row * 4.0
        for col in range(4):
            x0 = col * 5.0
            k = len(vertices)
            vertices += [
                (x0, y0, base),
                (x0 + width, y0, base),
                (x0 + width, y0 + dy, base + dz),
                (x0, y0 + dy, base + dz),
            ]
            # Winding gives an outward normal on the -y (sky-facing) side.
            quads.append((k, k + 1, k + 2, k + 3))
    return _quads_to_mesh(vertices, quads)


def _tank(radius: float = 5.0, height: float = 12.0, sides: int = 12) -> TriMesh:
    """Vertical cylindrical vessel approximated by a prism with a top cap."""
    vertices: list[tuple[float, float, float]] = []
    for k in range(sides):
        a = 2.0 * math.pi * k / sides
        vertices.append((radius * math.cos(a), radius * math.sin(a), 0.0))
    for k in range(sides):
        a = 2.0 * math.pi * k / sides
        vertices.append((radius * math.cos(a), radius * math.sin(a), height))
    top_center = len(vertices)
    vertices.append((0.0, 0.0, height))
    faces = []
    for k in range(sides):
        j = (k + 1) % sides
        faces.append((k, j, sides + j))
        faces.append((k, sides + j, sides + k))
        faces.append((sides + k, sides + j, top_center))
    return TriMesh(vertices, faces)


def _wall(vertices, quads, corners, splits: int) -> None:
    """Subdivide one rectangular wall into `splits` vertical panels."""
    p0, p1, p2, p3 = (np.asarray(c, dtype=float) for c in corners)
    for k in range(splits):
        a = p0 + (p1 - p0) * (k / splits)
        b = p0 + (p1 - p0) * ((k + 1) / splits)
        c = p3 + (p2 - p3) * ((k + 1) / splits)
        d = p3 + (p2 - p3) * (k / splits)
        base = len(vertices)
        vertices += [tuple(a), tuple(b), tuple(c), tuple(d)]
        quads.append((base, base + 1, base + 2, base + 3))


def _box_shell(vertices, quads, x0: float, y0: float, w: float, d: float,
               h: float, splits: tuple[int, int] = (1, 1)) -> None:
    """Four outward walls plus a roof for one axis-aligned box (no floor)."""
    sx, sy = splits
    x1, y1 = x0 + w, y0 + d
    # Bottom edges run so the right-hand-rule normal points away from the box.
    _wall(vertices, quads, [(x0, y0, 0), (x1, y0, 0), (x1, y0, h), (x0, y0, h)], sx)
    _wall(vertices, quads, [(x1, y1, 0), (x0, y1, 0), (x0, y1, h), (x1, y1, h)], sx)
    _wall(vertices, quads, [(x0, y1, 0), (x0, y0, 0), (x0, y0, h), (x0, y1, h)], sy)
    _wall(vertices, quads, [(x1, y0, 0), (x1, y1, 0), (x1, y1, h), (x1, y0, h)], sy)
    base = len(vertices)
    vertices += [(x0, y0, h), (x1, y0, h), (x1, y1, h), (x0, y1, h)]
    quads.append((base, base + 1, base + 2, base + 3))


def _hall() -> TriMesh:
    """Large storage hall: a single box with subdivided walls."""
    vertices: list[tuple[float, float, float]] = []
    quads: list[tuple[int, int, int, int]] = []
    _box_shell(vertices, quads, 0.0, 0.0, 24.0, 12.0, 8.0, splits=(3, 2))
    return _quads_to_mesh(vertices, quads)


def _transformer() -> TriMesh:
    """Small substation transformer: main body plus a radiator bank."""
    vertices: list[tuple[float, float, float]] = []
    quads: list[tuple[int, int, int, int]] = []
    _box_shell(vertices, quads, 0.0, 0.0, 3.0, 2.0, 2.5)
    _box_shell(vertices, quads, 4.0, 0.25, 1.5, 1.5, 3.5)
    return _quads_to_mesh(vertices, quads)


def builtin_archetypes() -> tuple[Archetype, ...]:
    """The four built-in structure archetypes, panel array weighted 0.25."""
    return (
        Archetype("panel-array", _panel_array(), weight=0.25),
        Archetype("tank", _tank(), weight=1.0),
        Archetype("hall", _hall(), weight=1.0),
        Archetype("transformer", _transformer(), weight=1.0),
    )


def _boxes_separated(a_min, a_max, b_min, b_max, margin: float) -> bool:
    """Horizontal AABB separation with at least `margin` between footprints."""
    return (a_max[0] + margin <= b_min[0] or b_max[0] + margin <= a_min[0]
            or a_max[1] + margin <= b_min[1] or b_max[1] + margin <= a_min[1])


def generate(archetypes: Sequence[Archetype], count: int,
             bounds: tuple[float, float, float],
             margin: float = DEFAULT_MARGIN,
             rng: np.random.Generator | None = None,
             *,
             vehicle: VehicleConfig | None = None,
             sensor: SensorConfig | None = None,
             mission: MissionConfig | None = None) -> Scenario:
    """Place `count` random archetypes without overlap inside the bounds.

    Placement uses rejection sampling with a per-structure attempt cap;
    exceeding it (area too dense for the margin) raises PlacementError.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if not archetypes:
        raise ValueError("need at least one archetype")
    if rng is None:
        rng = np.random.default_rng(0)
    dx, dy, dz = bounds
    structures: list[Structure] = []
    placed: list[tuple[np.ndarray, np.ndarray]] = []
    for index in range(count):
        for attempt in range(PLACEMENT_ATTEMPTS):
            arch = archetypes[int(rng.integers(len(archetypes)))]
            yaw = float(rng.uniform(-math.pi, math.pi))
            rotated = arch.mesh.transformed(yaw=yaw)
            mn, mx = rotated.bounding_box()
            extent = mx - mn
            if extent[0] > dx or extent[1] > dy or extent[2] > dz:
                continue
            tx = float(rng.uniform(-mn[0], dx - mx[0]))
            ty = float(rng.uniform(-mn[1], dy - mx[1]))
            tz = -float(mn[2])  # base on the ground plane
            candidate = rotated.transformed(translation=(tx, ty, tz))
            c_min, c_max = candidate.bounding_box()
            if all(_boxes_separated(c_min, c_max, p_min, p_max, margin)
                   for p_min, p_max in placed):
                placed.append((c_min, c_max))
                structures.append(Structure(
                    id=f"s{index:02d}-{arch.name}",
                    mesh=candidate,
                    weight=arch.weight,
                    archetype=arch.name,
                ))
                break
        else:
            raise PlacementError(
                f"could not place structure {index + 1}/{count} within "
                f"{PLACEMENT_ATTEMPTS} attempts (bounds {bounds}, margin {margin})")
    return Scenario(
        structures=tuple(structures),
        bounds=(float(dx), float(dy), float(dz)),
        vehicle=vehicle or VehicleConfig(),
        sensor=sensor or SensorConfig(),
        mission=mission or MissionConfig(),
        margin=float(margin),
    )


def validate_scenario(scenario: Scenario) -> None:
    """Independent post-hoc check of the scenario invariants."""
    dx, dy, dz = scenario.bounds
    seen: set[str] = set()
    boxes = []
    for s in scenario.structures:
        if s.id in seen:
            raise ValueError(f"duplicate structure id {s.id!r}")
        seen.add(s.id)
        mn, mx = s.mesh.bounding_box()
        if mn[0] < -1e-9 or mn[1] < -1e-9 or mn[2] < -1e-9:
            raise ValueError(f"structure {s.id!r} extends outside the area origin")
        if mx[0] > dx + 1e-9 or mx[1] > dy + 1e-9 or mx[2] > dz + 1e-9:
            raise ValueError(f"structure {s.id!r} exceeds the area bounds")
        boxes.append((s.id, mn, mx))
    for i in range(len(boxes)):
        for j in range(i + 1, len(boxes)):
            _, a_min, a_max = boxes[i]
            _, b_min, b_max = boxes[j]
            if not _boxes_separated(a_min, a_max, b_min, b_max,
                                    scenario.margin - 1e-9):
                raise ValueError(
                    f"structures {boxes[i][0]!r} and {boxes[j][0]!r} violate the "
                    f"{scenario.margin} m separation margin")
