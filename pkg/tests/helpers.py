"""Shared builders for test meshes, structures and synthetic coverage paths."""

from __future__ import annotations

from inspectour.config import VehicleConfig
from inspectour.coverage import CoveragePath, Viewpoint
from inspectour.geometry import Pose, Structure, TriMesh
from inspectour.motion import travel_time


def wall_mesh(panels: int, panel_width: float = 1.0, height: float = 1.0) -> TriMesh:
    """Vertical wall in the xz plane made of unit panels, normals facing -y."""
    vertices: list[tuple[float, float, float]] = []
    faces: list[tuple[int, int, int]] = []
    for k in range(panels):
        x0 = k * panel_width
        x1 = x0 + panel_width
        base = len(vertices)
        vertices += [(x0, 0.0, 0.0), (x1, 0.0, 0.0), (x1, 0.0, height), (x0, 0.0, height)]
        faces += [(base, base + 1, base + 2), (base, base + 2, base + 3)]
    return TriMesh(vertices, faces)


def wall_structure(sid: str = "wall", panels: int = 3, weight: float = 1.0,
                   offset: tuple[float, float, float] = (0.0, 0.0, 0.0)) -> Structure:
    mesh = wall_mesh(panels).transformed(translation=offset)
    return Structure(id=sid, mesh=mesh, weight=weight)


def closed_box_mesh(w: float = 2.0, d: float = 2.0, h: float = 2.0) -> TriMesh:
    """Fully closed axis-aligned box: 12 triangles, outward normals."""
    x1, y1, z1 = w, d, h
    v = [
        (0, 0, 0), (x1, 0, 0), (x1, y1, 0), (0, y1, 0),
        (0, 0, z1), (x1, 0, z1), (x1, y1, z1), (0, y1, z1),
    ]
    quads = [
        (0, 1, 5, 4),   # front (-y)
        (2, 3, 7, 6),   # back (+y)
        (3, 0, 4, 7),   # left (-x)
        (1, 2, 6, 5),   # right (+x)
        (4, 5, 6, 7),   # top (+z)
        (3, 2, 1, 0),   # bottom (-z)
    ]
    faces = []
    for a, b, c, dd in quads:
        faces += [(a, b, c), (a, c, dd)]
    return TriMesh(v, faces)


def timed_path(structure_id: str, poses: list[Pose],
               covered_sets: list[set[int]], vehicle: VehicleConfig,
               *, is_cycle: bool = True,
               coverable: set[int] | None = None,
               generating: list[int | None] | None = None) -> CoveragePath:
    """CoveragePath with timing computed from the motion model."""
    times = [0.0]
    for a, b in zip(poses, poses[1:]):
        times.append(times[-1] + travel_time(a, b, vehicle.v_inspect,
                                             vehicle.yaw_rate_max))
    closing = 0.0
    if is_cycle and len(poses) > 1:
        closing = travel_time(poses[-1], poses[0], vehicle.v_inspect,
                              vehicle.yaw_rate_max)
    gens = generating if generating is not None else [None] * len(poses)
    points = tuple(Viewpoint(p, g, frozenset(c))
                   for p, g, c in zip(poses, gens, covered_sets))
    union: set[int] = set()
    for c in covered_sets:
        union |= set(c)
    return CoveragePath(
        structure_id=structure_id,
        points=points,
        cumulative_times=tuple(times),
        total_duration=times[-1] + closing,
        is_cycle=is_cycle,
        coverable_faces=frozenset(coverable if coverable is not None else union),
    )
