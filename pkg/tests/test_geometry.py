import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from inspectour.geometry import (MeshError, Pose, Structure, TriMesh,
                                 angular_distance, mesh_area, normalize_yaw)

from helpers import wall_mesh


RIGHT_TRIANGLE = TriMesh([(0, 0, 0), (1, 0, 0), (0, 1, 0)], [(0, 1, 2)])


class TestNormalizeYaw:
    def test_identity(self):
        assert normalize_yaw(0.0) == 0.0

    def test_wraps_down(self):
        assert normalize_yaw(3 * math.pi) == pytest.approx(math.pi)

    def test_boundary_is_positive_pi(self):
        # (-pi, pi] convention: -pi maps to +pi.
        assert normalize_yaw(-math.pi) == pytest.approx(math.pi)
        assert normalize_yaw(math.pi) == pytest.approx(math.pi)

    @pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
    def test_rejects_non_finite(self, bad):
        with pytest.raises(ValueError):
            normalize_yaw(bad)

    @given(st.floats(min_value=-1e9, max_value=1e9))
    def test_idempotent_and_in_range(self, psi):
        once = normalize_yaw(psi)
        assert -math.pi < once <= math.pi
        assert normalize_yaw(once) == once

    @given(st.floats(min_value=-1e6, max_value=1e6))
    def test_congruent_mod_two_pi(self, psi):
        wrapped = normalize_yaw(psi)
        assert math.sin(wrapped) == pytest.approx(math.sin(psi), abs=1e-9)
        assert math.cos(wrapped) == pytest.approx(math.cos(psi), abs=1e-9)


class TestAngularDistance:
    def test_symmetric_shortest_arc(self):
        assert angular_distance(0.1, -0.1) == pytest.approx(0.2)
        assert angular_distance(-3.0, 3.0) == pytest.approx(2 * math.pi - 6.0)

    @given(st.floats(-10, 10), st.floats(-10, 10))
    def test_range(self, a, b):
        d = angular_distance(a, b)
        assert 0.0 <= d <= math.pi + 1e-12


class TestPose:
    def test_normalizes_yaw_on_construction(self):
        assert Pose(0, 0, 0, 3 * math.pi).psi == pytest.approx(math.pi)

    def test_immutable(self):
        pose = Pose(1, 2, 3, 0.5)
        with pytest.raises(AttributeError):
            pose.x = 9.0

    def test_distance(self):
        assert Pose(0, 0, 0).distance_to(Pose(3, 4, 0)) == pytest.approx(5.0)


class TestTriMesh:
    def test_right_triangle_area(self):
        # By hand: 0.5 * |u x v| with unit legs.
        assert mesh_area(RIGHT_TRIANGLE) == pytest.approx(0.5)

    def test_area_additive(self):
        two = TriMesh([(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0)],
                      [(0, 1, 2), (1, 3, 2)])
        assert mesh_area(two) == pytest.approx(1.0)

    def test_empty_mesh_rejected(self):
        with pytest.raises(MeshError):
            TriMesh([(0, 0, 0), (1, 0, 0)], [])

    def test_zero_area_face_rejected(self):
        with pytest.raises(MeshError, match="degenerate"):
            TriMesh([(0, 0, 0), (1, 0, 0), (2, 0, 0)], [(0, 1, 2)])

    def test_face_index_out_of_range_rejected(self):
        with pytest.raises(MeshError, match="out of range"):
            TriMesh([(0, 0, 0), (1, 0, 0), (0, 1, 0)], [(0, 1, 3)])

    def test_derived_face_quantities(self):
        mesh = RIGHT_TRIANGLE
        assert mesh.face_centroids[0] == pytest.approx([1 / 3, 1 / 3, 0.0])
        assert mesh.face_normals[0] == pytest.approx([0.0, 0.0, 1.0])
        assert mesh.face_areas[0] == pytest.approx(0.5)
        assert mesh.area == pytest.approx(sum(mesh.face_areas))

    def test_area_invariant_under_rigid_transform(self):
        rng = np.random.default_rng(7)
        mesh = wall_mesh(4)
        base = mesh_area(mesh)
        for _ in range(20):
            ax, ay, az = rng.uniform(-math.pi, math.pi, size=3)
            rx = np.array([[1, 0, 0],
                           [0, math.cos(ax), -math.sin(ax)],
                           [0, math.sin(ax), math.cos(ax)]])
            ry = np.array([[math.cos(ay), 0, math.sin(ay)],
                           [0, 1, 0],
                           [-math.sin(ay), 0, math.cos(ay)]])
            rz = np.array([[math.cos(az), -math.sin(az), 0],
                           [math.sin(az), math.cos(az), 0],
                           [0, 0, 1]])
            verts = mesh.vertices @ (rz @ ry @ rx).T + rng.uniform(-50, 50, size=3)
            moved = TriMesh(verts, mesh.faces)
            assert mesh_area(moved) == pytest.approx(base, rel=1e-9)

    def test_vertices_read_only(self):
        mesh = wall_mesh(1)
        with pytest.raises(ValueError):
            mesh.vertices[0, 0] = 99.0

    def test_circumradius_equilateral(self):
        side = 1.0
        mesh = TriMesh([(0, 0, 0), (side, 0, 0), (side / 2, 0, side * math.sqrt(3) / 2)],
                       [(0, 1, 2)])
        assert mesh.face_circumradius(0) == pytest.approx(side / math.sqrt(3))


class TestStructure:
    def test_negative_weight_rejected(self):
        with pytest.raises(ValueError):
            Structure(id="x", mesh=RIGHT_TRIANGLE, weight=-0.1)

    def test_empty_id_rejected(self):
        with pytest.raises(ValueError):
            Structure(id="", mesh=RIGHT_TRIANGLE)

    def test_zero_weight_allowed(self):
        assert Structure(id="x", mesh=RIGHT_TRIANGLE, weight=0.0).weight == 0.0
