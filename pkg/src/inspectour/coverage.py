"""Full-coverage paths for a single structure.

A stand-in for a dedicated single-structure coverage planner: one
viewpoint is synthesized per coverable face (standoff along the face
normal, yaw facing the face), viewpoints are toured with the travel-time
TSP at inspection speed, and the tour is timed with the straight-line
motion model. Faces whose synthesized viewpoint cannot actually see them
(field of view, range, incidence) are reported as uncoverable and are
excluded from coverage-ratio denominators.

Externally precomputed coverage paths can be ingested; their timing is
rebuilt from the motion model so downstream accounting stays exact.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .config import SensorConfig, VehicleConfig
from .geometry import Pose, Structure, TriMesh
from .motion import travel_time
from .tsp import build_cost_matrix, solve_tsp

# Ingested timing may deviate this much (relative) from the motion model
# before a warning is raised; the path is re-timed either way.
INGEST_TIMING_TOLERANCE = 0.05


class CoverageError(ValueError):
    """Raised when no coverage path can be produced for a structure."""


@dataclass(frozen=True)
class Viewpoint:
    """A camera pose together with the faces it covers."""

    pose: Pose
    generating_face: int | None
    covered_faces: frozenset[int]


@dataclass(frozen=True)
class CoveragePath:
    """Timed viewpoint sequence achieving full coverage of one structure.

    cumulative_times[k] is the arrival time at points[k], starting at 0.
    For cyclic paths total_duration additionally includes the closing
    segment back to points[0], so a subset of any duration up to
    total_duration can be extracted from any entry point.
    """

    structure_id: str
    points: tuple[Viewpoint, ...]
    cumulative_times: tuple[float, ...]
    total_duration: float
    is_cycle: bool
    coverable_faces: frozenset[int]

    def __post_init__(self) -> None:
        if len(self.points) != len(self.cumulative_times):
            raise ValueError("one cumulative time per path point required")
        if not self.points:
            raise ValueError("coverage path needs at least one point")
        if self.cumulative_times[0] != 0.0:
            raise ValueError("cumulative times must start at 0")

    @property
    def point_count(self) -> int:
        return len(self.points)

    def segment_durations(self) -> list[float]:
        """Per-segment durations; cyclic paths include the closing segment."""
        times = self.cumulative_times
        durations = [times[k + 1] - times[k] for k in range(len(times) - 1)]
        if self.is_cycle and len(self.points) > 1:
            durations.append(self.total_duration - times[-1])
        return durations

    def covered_union(self) -> frozenset[int]:
        result: set[int] = set()
        for point in self.points:
            result |= point.covered_faces
        return frozenset(result)


def _camera_axes(psi: float, pitch: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    cy, sy = math.cos(psi), math.sin(psi)
    cp, sp = math.cos(pitch), math.sin(pitch)
    forward = np.array([cy * cp, sy * cp, sp])
    left = np.array([-sy, cy, 0.0])
    up = np.cross(forward, left)
    return forward, left, up


def visible_faces(pose: Pose, mesh: TriMesh, sensor: SensorConfig) -> set[int]:
    """Indices of faces visible from the pose.

    A face is visible when its centroid lies within the sensor's depth
    range, inside both FoV half-angles of the camera frame (yaw plus the
    fixed camera pitch), and the face is front-facing (outward normal has
    a negative component along the viewing direction). Occlusion between
    faces is not tested.
    """
    rel = mesh.face_centroids - pose.position
    dist = np.linalg.norm(rel, axis=1)
    forward, left, up = _camera_axes(pose.psi, sensor.camera_pitch)
    x = rel @ forward
    y = rel @ left
    z = rel @ up
    with np.errstate(invalid="ignore"):
        in_fov = (
            (x > 0.0)
            & (np.abs(np.arctan2(y, x)) <= sensor.fov_h / 2.0)
            & (np.abs(np.arctan2(z, x)) <= sensor.fov_v / 2.0)
        )
    in_range = (dist >= sensor.range_min) & (dist <= sensor.range_max)
    front_facing = np.einsum("ij,ij->i", mesh.face_normals, rel) < 0.0
    return set(int(f) for f in np.flatnonzero(in_fov & in_range & front_facing))


def synthesize_viewpoint(mesh: TriMesh, face: int,
                         sensor: SensorConfig) -> Viewpoint | None:
    """Viewpoint observing one face, or None if the face is uncoverable.

    The pose stands off along the face's outward normal at the distance
    that fits the face circumradius into the narrower FoV half-angle,
    clamped into the sensor depth range; yaw faces the centroid's
    horizontal bearing. Uncoverable when the face cannot fit within
    range_max, when the fixed camera pitch leaves the viewing axis more
    than incidence_max away from the face anti-normal, or when the
    synthesized pose fails the visibility test for its own face.
    """
    if not (0 <= face < mesh.face_count):
        raise IndexError(f"face index {face} out of range [0, {mesh.face_count})")
    half_angle = min(sensor.fov_h, sensor.fov_v) / 2.0
    standoff = mesh.face_circumradius(face) / math.tan(half_angle)
    if standoff > sensor.range_max:
        return None
    standoff = min(max(standoff, sensor.range_min), sensor.range_max)

    normal = mesh.face_normals[face]
    centroid = mesh.face_centroids[face]
    position = centroid + standoff * normal
    horizontal = math.hypot(normal[0], normal[1])
    psi = math.atan2(-normal[1], -normal[0]) if horizontal > 1e-12 else 0.0
    pose = Pose(position[0], position[1], position[2], psi)

    forward, _, _ = _camera_axes(pose.psi, sensor.camera_pitch)
    incidence = math.acos(float(np.clip(forward @ (-normal), -1.0, 1.0)))
    if incidence > sensor.incidence_max:
        return None
    covered = visible_faces(pose, mesh, sensor)
    if face not in covered:
        return None
    return Viewpoint(pose, face, frozenset(covered))


def coverable_viewpoints(mesh: TriMesh, sensor: SensorConfig) -> list[Viewpoint]:
    """One synthesized viewpoint per coverable face, in face order."""
    points = []
    for face in range(mesh.face_count):
        viewpoint = synthesize_viewpoint(mesh, face, sensor)
        if viewpoint is not None:
            points.append(viewpoint)
    return points


def plan_coverage(structure: Structure, sensor: SensorConfig,
                  vehicle: VehicleConfig, seed: int = 0) -> CoveragePath:
    """Timed full-coverage cycle over all coverable faces of the structure.

    Viewpoint order comes from the travel-time TSP at inspection speed;
    the result is deterministic for a given (structure, sensor, vehicle,
    seed). Raises CoverageError when no face is coverable.
    """
    raw_points = coverable_viewpoints(structure.mesh, sensor)
    if not raw_points:
        raise CoverageError(
            f"structure {structure.id!r} has no coverable face under this sensor")
    coverable = frozenset(
        vp.generating_face for vp in raw_points if vp.generating_face is not None)
    # Credit only coverable faces so coverage ratios stay within [0, 1]
    # against the coverable-area denominator.
    points = [
        Viewpoint(vp.pose, vp.generating_face, vp.covered_faces & coverable)
        for vp in raw_points
    ]

    matrix = build_cost_matrix([(vp.pose, vp.pose) for vp in points], vehicle,
                               speed=vehicle.v_inspect)
    tour = solve_tsp(matrix, closed=True, seed=seed)
    ordered = [points[i] for i in tour.order]

    times = [0.0]
    for prev, nxt in zip(ordered, ordered[1:]):
        times.append(times[-1] + travel_time(prev.pose, nxt.pose,
                                             vehicle.v_inspect, vehicle.yaw_rate_max))
    closing = 0.0
    if len(ordered) > 1:
        closing = travel_time(ordered[-1].pose, ordered[0].pose,
                              vehicle.v_inspect, vehicle.yaw_rate_max)
    return CoveragePath(
        structure_id=structure.id,
        points=tuple(ordered),
        cumulative_times=tuple(times),
        total_duration=times[-1] + closing,
        is_cycle=True,
        coverable_faces=coverable,
    )


def ingest_coverage_path(structure: Structure,
                         poses: Sequence[Pose],
                         cumulative_times: Sequence[float],
                         covered_faces: Sequence[Iterable[int]],
                         vehicle: VehicleConfig,
                         *,
                         generating_faces: Sequence[int | None] | None = None,
                         is_cycle: bool = False,
                         coverable_faces: Iterable[int] | None = None) -> CoveragePath:
    """Validate and adopt an externally computed coverage path.

    Face indices must be valid for the structure's mesh and the supplied
    cumulative times monotone. Timing is always rebuilt from the motion
    model at inspection speed (the supplied times are only checked); a
    deviation beyond INGEST_TIMING_TOLERANCE raises a warning.
    """
    n = len(poses)
    if n == 0:
        raise ValueError("coverage path needs at least one point")
    if len(cumulative_times) != n or len(covered_faces) != n:
        raise ValueError("poses, times and covered-face records must align")
    if generating_faces is not None and len(generating_faces) != n:
        raise ValueError("one generating face per point required")

    face_count = structure.mesh.face_count
    covered: list[frozenset[int]] = []
    for k, faces in enumerate(covered_faces):
        faces = frozenset(int(f) for f in faces)
        for f in faces:
            if not (0 <= f < face_count):
                raise ValueError(
                    f"point {k} covers face {f}, outside [0, {face_count})")
        covered.append(faces)
    if generating_faces is not None:
        for k, gen in enumerate(generating_faces):
            if gen is not None and gen not in covered[k]:
                raise ValueError(f"point {k}: generating face {gen} not in covered set")

    given = [float(t) for t in cumulative_times]
    if given[0] != 0.0:
        raise ValueError("cumulative times must start at 0")
    if any(b < a for a, b in zip(given, given[1:])):
        raise ValueError("cumulative times must be nondecreasing")

    rebuilt = [0.0]
    mismatch = False
    for k in range(n - 1):
        seg = travel_time(poses[k], poses[k + 1], vehicle.v_inspect,
                          vehicle.yaw_rate_max)
        supplied = given[k + 1] - given[k]
        if abs(supplied - seg) > INGEST_TIMING_TOLERANCE * max(seg, 1e-9):
            mismatch = True
        rebuilt.append(rebuilt[-1] + seg)
    if mismatch:
        warnings.warn(
            f"coverage path for {structure.id!r}: supplied timing deviates more "
            f"than {INGEST_TIMING_TOLERANCE:.0%} from the motion model; re-timed",
            stacklevel=2)

    closing = 0.0
    if is_cycle and n > 1:
        closing = travel_time(poses[-1], poses[0], vehicle.v_inspect,
                              vehicle.yaw_rate_max)
    gens: Sequence[int | None]
    gens = generating_faces if generating_faces is not None else [None] * n
    points = tuple(Viewpoint(pose, gen, faces)
                   for pose, gen, faces in zip(poses, gens, covered))
    union: set[int] = set()
    for faces in covered:
        union |= faces
    coverable = frozenset(int(f) for f in coverable_faces) \
        if coverable_faces is not None else frozenset(union)
    return CoveragePath(
        structure_id=structure.id,
        points=points,
        cumulative_times=tuple(rebuilt),
        total_duration=rebuilt[-1] + closing,
        is_cycle=is_cycle,
        coverable_faces=coverable,
    )


def coverable_area(structure: Structure, path: CoveragePath) -> float:
    """Area of the faces the path's planner deemed coverable, in m^2."""
    if not path.coverable_faces:
        return 0.0
    indices = np.fromiter(path.coverable_faces, dtype=int)
    return float(structure.mesh.face_areas[indices].sum())
