"""Geometric primitives shared by the whole planner.

World frame, SI units: positions in meters, yaw in radians. Structure
poses are baked into the vertex coordinates when a scenario is loaded,
so every consumer sees world-frame meshes only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi

# Faces below this area (m^2) are treated as degenerate and rejected.
MIN_FACE_AREA = 1e-12


class MeshError(ValueError):
    """Raised when a mesh fails structural validation."""


def normalize_yaw(psi: float) -> float:
    """Wrap a yaw angle into (-pi, pi].

    Idempotent; rejects non-finite input. The half-open convention puts
    the branch cut at -pi, so normalize_yaw(-pi) == pi.
    """
    psi = float(psi)
    if not math.isfinite(psi):
        raise ValueError(f"yaw must be finite, got {psi!r}")
    wrapped = math.remainder(psi, TWO_PI)
    if wrapped <= -math.pi:
        wrapped += TWO_PI
    return wrapped


def angular_distance(a: float, b: float) -> float:
    """Shortest angular distance between two yaw angles, in [0, pi]."""
    return abs(normalize_yaw(b - a))


@dataclass(frozen=True)
class Pose:
    """Rotorcraft configuration: position plus yaw, roll/pitch assumed zero.

    Yaw is normalized to (-pi, pi] at construction time.
    """

    x: float
    y: float
    z: float
    psi: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "z", float(self.z))
        object.__setattr__(self, "psi", normalize_yaw(self.psi))

    @property
    def position(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def distance_to(self, other: "Pose") -> float:
        """Euclidean distance between the two positions (yaw ignored)."""
        return math.dist((self.x, self.y, self.z), (other.x, other.y, other.z))


class TriMesh:
    """Immutable triangular surface mesh with per-face derived quantities.

    Vertices are (V, 3) world-frame coordinates; faces are (F, 3) vertex
    index triples. Face normals follow the right-hand rule on the vertex
    order and are taken as outward. Degenerate (zero-area) faces and
    out-of-range indices are rejected at construction.
    """

    __slots__ = ("vertices", "faces", "face_centroids", "face_normals", "face_areas")

    def __init__(self, vertices, faces) -> None:
        verts = np.array(vertices, dtype=float)
        fcs = np.array(faces, dtype=int)
        if verts.ndim != 2 or verts.shape[1] != 3:
            raise MeshError(f"vertices must be (V, 3), got shape {verts.shape}")
        if fcs.ndim != 2 or fcs.shape[1] != 3:
            raise MeshError(f"faces must be (F, 3), got shape {fcs.shape}")
        if fcs.shape[0] == 0:
            raise MeshError("mesh has no faces")
        if not np.all(np.isfinite(verts)):
            raise MeshError("vertices contain non-finite coordinates")
        if fcs.min() < 0 or fcs.max() >= verts.shape[0]:
            raise MeshError("face references a vertex index out of range")

        a = verts[fcs[:, 0]]
        b = verts[fcs[:, 1]]
        c = verts[fcs[:, 2]]
        cross = np.cross(b - a, c - a)
        norms = np.linalg.norm(cross, axis=1)
        degenerate = norms < 2.0 * MIN_FACE_AREA
        if np.any(degenerate):
            bad = int(np.flatnonzero(degenerate)[0])
            raise MeshError(f"face {bad} is degenerate (zero area)")

        self.vertices = verts
        self.faces = fcs
        self.face_centroids = (a + b + c) / 3.0
        self.face_normals = cross / norms[:, None]
        self.face_areas = 0.5 * norms
        for arr in (self.vertices, self.faces, self.face_centroids,
                    self.face_normals, self.face_areas):
            arr.setflags(write=False)

    @property
    def face_count(self) -> int:
        return self.faces.shape[0]

    @property
    def area(self) -> float:
        """Total surface area in m^2 (sum of per-face areas)."""
        return float(self.face_areas.sum())

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def face_circumradius(self, face: int) -> float:
        """Circumradius of one face: R = abc / (4A)."""
        i, j, k = self.faces[face]
        p, q, r = self.vertices[i], self.vertices[j], self.vertices[k]
        la = np.linalg.norm(q - r)
        lb = np.linalg.norm(p - r)
        lc = np.linalg.norm(p - q)
        return float(la * lb * lc / (4.0 * self.face_areas[face]))

    def transformed(self, yaw: float = 0.0, translation=(0.0, 0.0, 0.0)) -> "TriMesh":
        """New mesh rotated by yaw about the z axis, then translated."""
        cy, sy = math.cos(yaw), math.sin(yaw)
        rot = np.array([[cy, -sy, 0.0], [sy, cy, 0.0], [0.0, 0.0, 1.0]])
        verts = self.vertices @ rot.T + np.asarray(translation, dtype=float)
        return TriMesh(verts, self.faces)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TriMesh):
            return NotImplemented
        return (np.array_equal(self.vertices, other.vertices)
                and np.array_equal(self.faces, other.faces))

    def __repr__(self) -> str:
        return f"TriMesh(vertices={self.vertices.shape[0]}, faces={self.face_count})"


def mesh_area(mesh: TriMesh) -> float:
    """Total mesh surface area via the per-face cross-product formula."""
    return mesh.area


@dataclass(frozen=True)
class Structure:
    """One inspection target: a world-frame mesh with an importance weight."""

    id: str
    mesh: TriMesh
    weight: float = 1.0
    archetype: str | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("structure id must be non-empty")
        if not (self.weight >= 0.0):
            raise ValueError(f"importance weight must be >= 0, got {self.weight}")
