import math

import numpy as np
import pytest

from inspectour.config import MissionConfig
from inspectour.geometry import Pose
from inspectour.motion import travel_time
from inspectour.planner import (assemble_path, assign_inspection_times,
                                available_duration, compute_reward,
                                extract_subpath, fit_times_to_budget, run,
                                run_iteration, sample_structure_subset)

from helpers import timed_path, wall_structure


class TestSubsetSampling:
    def test_single_structure_always_selected(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            assert sample_structure_subset(["only"], rng) == ["only"]

    def test_inclusion_frequency_is_binomial(self):
        rng = np.random.default_rng(1)
        ids = [f"s{i}" for i in range(8)]
        counts = {i: 0 for i in ids}
        draws = 10000
        for _ in range(draws):
            for sid in sample_structure_subset(ids, rng):
                counts[sid] += 1
        for sid in ids:
            assert 0.45 <= counts[sid] / draws <= 0.55

    def test_deterministic_per_seed(self):
        ids = [f"s{i}" for i in range(6)]
        a = sample_structure_subset(ids, np.random.default_rng(42))
        b = sample_structure_subset(ids, np.random.default_rng(42))
        assert a == b

    def test_empty_universe_rejected(self):
        with pytest.raises(ValueError):
            sample_structure_subset([], np.random.default_rng(0))


class TestTimeFitting:
    def test_uniform_scale_down(self):
        # Scale factor 0.5 applied uniformly.
        assert fit_times_to_budget([100, 200, 300], [400, 400, 400], 300) == \
            pytest.approx([50, 100, 150])

    def test_exact_budget_unchanged(self):
        assert fit_times_to_budget([100, 200], [300, 300], 300) == \
            pytest.approx([100, 200])

    def test_water_filling_redistributes_surplus(self):
        # Scale by 4 gives [200, 200]; first capped at 100, surplus to second.
        assert fit_times_to_budget([50, 50], [100, 1000], 400) == \
            pytest.approx([100, 300])

    def test_budget_beyond_demand_returns_caps(self):
        assert fit_times_to_budget([10, 20], [50, 60], 1000) == \
            pytest.approx([50, 60])

    def test_invariants_on_random_inputs(self):
        rng = np.random.default_rng(9)
        for _ in range(200):
            n = int(rng.integers(1, 7))
            caps = rng.uniform(1.0, 100.0, size=n)
            raw = rng.uniform(0.0, caps)
            budget = float(rng.uniform(0.0, 1.5 * caps.sum()))
            times = fit_times_to_budget(raw, caps, budget)
            assert all(-1e-9 <= t <= c + 1e-9 for t, c in zip(times, caps))
            assert math.fsum(times) == pytest.approx(
                min(budget, float(caps.sum())), abs=1e-6)

    def test_negative_budget_rejected(self):
        with pytest.raises(ValueError):
            fit_times_to_budget([1.0], [2.0], -0.5)

    def test_assign_draws_within_caps(self):
        rng = np.random.default_rng(3)
        caps = [100.0, 200.0, 50.0]
        times = assign_inspection_times(caps, 120.0, rng)
        assert math.fsum(times) == pytest.approx(120.0, abs=1e-6)
        assert all(0.0 <= t <= c for t, c in zip(times, caps))

    def test_assign_negative_budget_rejected(self):
        with pytest.raises(ValueError):
            assign_inspection_times([10.0], -1.0, np.random.default_rng(0))


def three_point_cycle(vehicle, sid="w"):
    """3 viewpoints 2 m apart: segments of 2 s, closing leg 4 s, total 8 s."""
    poses = [Pose(2.0 * k, -2.0, 0.5, math.pi / 2) for k in range(3)]
    covered = [{0, 1}, {2, 3}, {4, 5}]
    return timed_path(sid, poses, covered, vehicle, is_cycle=True)


class TestExtractSubpath:
    def test_full_duration_credits_everything(self, vehicle):
        path = three_point_cycle(vehicle)
        sub = extract_subpath(path, 1, path.total_duration)
        assert sub.credited_faces == {0, 1, 2, 3, 4, 5}
        assert sub.duration == pytest.approx(path.total_duration, abs=1e-9)
        # Full cycle returns to the entry viewpoint.
        assert sub.terminal_pose == path.points[1].pose

    def test_zero_duration_is_hover_at_entry(self, vehicle):
        path = three_point_cycle(vehicle)
        sub = extract_subpath(path, 2, 0.0)
        assert sub.poses == (path.points[2].pose,)
        assert sub.credited_faces == {4, 5}
        assert sub.duration == 0.0

    def test_partial_segment_interpolates_terminal(self, vehicle):
        # Segments: 2 s, 2 s, then the 4 s closing leg. T = 5 from entry 0
        # reaches viewpoints 0,1,2 and stops 1 s into the closing leg.
        path = three_point_cycle(vehicle)
        sub = extract_subpath(path, 0, 5.0)
        assert sub.credited_faces == {0, 1, 2, 3, 4, 5}
        assert len(sub.poses) == 4
        assert sub.duration == pytest.approx(5.0, abs=1e-9)
        # 1 s into the 4 s leg from (4,-2) back to (0,-2): fraction 0.25.
        assert sub.terminal_pose.x == pytest.approx(3.0)
        assert sub.terminal_pose.y == pytest.approx(-2.0)

    def test_interpolated_terminal_earns_no_credit(self, vehicle):
        path = three_point_cycle(vehicle)
        sub = extract_subpath(path, 0, 1.0)  # halfway along the first segment
        assert sub.credited_faces == {0, 1}
        assert len(sub.poses) == 2
        assert sub.terminal_pose.x == pytest.approx(1.0)

    def test_wraps_around_cycle(self, vehicle):
        path = three_point_cycle(vehicle)
        sub = extract_subpath(path, 2, 4.5)  # closing leg (4 s) + 0.5 s onward
        assert 0 in sub.credited_faces and 1 in sub.credited_faces
        assert sub.duration == pytest.approx(4.5, abs=1e-9)

    def test_excessive_duration_rejected(self, vehicle):
        path = three_point_cycle(vehicle)
        with pytest.raises(ValueError):
            extract_subpath(path, 0, path.total_duration + 1.0)

    def test_open_path_limited_by_entry(self, vehicle):
        poses = [Pose(2.0 * k, -2.0, 0.5, math.pi / 2) for k in range(3)]
        path = timed_path("open", poses, [{0}, {1}, {2}], vehicle, is_cycle=False)
        assert available_duration(path, 0) == pytest.approx(4.0)
        assert available_duration(path, 1) == pytest.approx(2.0)
        with pytest.raises(ValueError):
            extract_subpath(path, 1, 3.0)

    def test_segment_timing_consistent_with_motion(self, vehicle):
        path = three_point_cycle(vehicle)
        sub = extract_subpath(path, 0, 5.0)
        for a, b, d in zip(sub.poses, sub.poses[1:], sub.segment_durations):
            assert travel_time(a, b, vehicle.v_inspect, vehicle.yaw_rate_max) == \
                pytest.approx(d, abs=1e-9)


class TestComputeReward:
    def test_full_path_full_ratio(self, vehicle):
        structure = wall_structure("w", panels=3)  # 6 faces of 0.5 m^2
        path = three_point_cycle(vehicle)
        sub = extract_subpath(path, 0, path.total_duration)
        result = compute_reward(structure, sub, path.coverable_faces)
        assert result.ratio == pytest.approx(1.0)
        assert result.covered_area == pytest.approx(3.0)
        assert result.reward == pytest.approx(3.0)

    def test_weighted_reward_product(self, vehicle):
        # w = 0.25 with 40 m^2 credited must give reward 10.
        structure = wall_structure("w", panels=20, weight=0.25)
        poses = [Pose(0, -3, 0.5, math.pi / 2), Pose(10, -3, 0.5, math.pi / 2)]
        path = timed_path("w", poses, [set(range(40)), set()], vehicle)
        sub = extract_subpath(path, 0, 0.0)
        result = compute_reward(structure, sub, path.coverable_faces)
        assert structure.mesh.face_areas.sum() == pytest.approx(20.0)
        assert result.covered_area == pytest.approx(20.0)  # 40 faces x 0.5
        assert result.reward == pytest.approx(5.0)

    def test_zero_duration_credits_entry_faces_only(self, vehicle):
        structure = wall_structure("w", panels=3)
        path = three_point_cycle(vehicle)
        sub = extract_subpath(path, 1, 0.0)
        result = compute_reward(structure, sub, path.coverable_faces)
        assert result.covered_area == pytest.approx(1.0)  # faces {2,3}
        assert result.ratio == pytest.approx(1.0 / 3.0)

    def test_uncoverable_faces_do_not_count(self, vehicle):
        structure = wall_structure("w", panels=3)
        path = three_point_cycle(vehicle)
        sub = extract_subpath(path, 0, 0.0)
        # Pretend only faces {0,1} are coverable: ratio uses that denominator.
        result = compute_reward(structure, sub, frozenset({0, 1}))
        assert result.ratio == pytest.approx(1.0)
        assert result.covered_area == pytest.approx(1.0)


class TestRunIteration:
    def test_generous_budget_gives_full_coverage(self, two_wall_scenario):
        scenario, paths = two_wall_scenario
        scenario = scenario.with_mission(MissionConfig(
            t_max=1000.0, closed_route=False, iterations=1, rng_seed=0))
        record, plan = run_iteration(scenario, paths, np.random.default_rng(5))
        assert plan is not None
        for reward in plan.rewards:
            assert reward.ratio == pytest.approx(1.0)
        assert record.feasible

    def test_tour_over_budget_discards(self, two_wall_scenario):
        scenario, paths = two_wall_scenario
        scenario = scenario.with_mission(MissionConfig(
            t_max=0.001, closed_route=False, iterations=1, rng_seed=0))
        # Force both structures sampled so a transit leg must exist.
        rng = np.random.default_rng(1)
        found_discard = False
        for _ in range(20):
            record, plan = run_iteration(scenario, paths, rng)
            if record.structure_count == 2:
                assert plan is None and not record.feasible
                found_discard = True
                break
            assert plan is None or plan.t_total <= 0.001 + 1e-6
        assert found_discard

    def test_deterministic(self, two_wall_scenario):
        scenario, paths = two_wall_scenario
        _, a = run_iteration(scenario, paths, np.random.default_rng(77))
        _, b = run_iteration(scenario, paths, np.random.default_rng(77))
        assert (a is None) == (b is None)
        if a is not None:
            assert a == b

    def test_budget_respected(self, two_wall_scenario):
        scenario, paths = two_wall_scenario
        structures = {s.id: s for s in scenario.structures}
        rng = np.random.default_rng(123)
        for _ in range(100):
            _, plan = run_iteration(scenario, paths, rng)
            if plan is not None:
                assert plan.t_total <= scenario.mission.t_max + 1e-6
                assert plan.t_total == pytest.approx(
                    math.fsum(sp.duration for sp in plan.subpaths) + plan.tour.cost,
                    abs=1e-6)
                assert plan.r_total == pytest.approx(
                    math.fsum(r.reward for r in plan.rewards), rel=1e-9)
                # Reward can never exceed the sampled structures' weighted
                # coverable area; coverage ratios stay within [0, 1].
                bound = sum(
                    structures[sid].weight * sum(
                        structures[sid].mesh.face_areas[f]
                        for f in paths[sid].coverable_faces)
                    for sid in plan.structure_ids)
                assert plan.r_total <= bound + 1e-9
                for reward in plan.rewards:
                    assert 0.0 <= reward.ratio <= 1.0 + 1e-12


class TestRun:
    def test_single_iteration_is_best(self, two_wall_scenario):
        scenario, paths = two_wall_scenario
        result = run(scenario, paths, MissionConfig(
            t_max=1000.0, closed_route=False, iterations=1, rng_seed=3))
        assert result.best is not None
        assert result.best.iteration == 0
        assert len(result.history) == 1

    def test_cumulative_best_nondecreasing(self, two_wall_scenario):
        scenario, paths = two_wall_scenario
        result = run(scenario, paths)
        best_so_far = 0.0
        for rec in result.history:
            best_so_far = max(best_so_far, rec.r_total)
            assert best_so_far >= rec.r_total
        assert result.best is not None
        assert result.best.r_total == pytest.approx(
            max(rec.r_total for rec in result.history))

    def test_generous_budget_reaches_full_coverage_everywhere(self, two_wall_scenario):
        scenario, paths = two_wall_scenario
        result = run(scenario, paths, MissionConfig(
            t_max=1000.0, closed_route=False, iterations=50, rng_seed=21))
        best = result.best
        assert best is not None
        assert len(best.structure_ids) == 2
        for reward in best.rewards:
            assert reward.ratio == pytest.approx(1.0)

    def test_no_feasible_iterations_reported(self, two_wall_scenario):
        scenario, paths = two_wall_scenario
        result = run(scenario, paths, MissionConfig(
            t_max=1e-6, closed_route=False, iterations=5, rng_seed=2))
        # Single-structure subsets hover for ~0 s and still fit; force the
        # check through history flags rather than assuming none feasible.
        assert len(result.history) == 5
        if result.best is None:
            assert result.feasible_count == 0
            assert result.path is None

    def test_ties_resolve_to_earliest_iteration(self, two_wall_scenario):
        scenario, paths = two_wall_scenario
        result = run(scenario, paths, MissionConfig(
            t_max=1000.0, closed_route=False, iterations=30, rng_seed=8))
        best = result.best
        assert best is not None
        first_equal = next(rec.index for rec in result.history
                           if rec.feasible and rec.r_total == best.r_total)
        assert best.iteration == first_equal


class TestAssemblePath:
    def test_single_structure_open_route_is_subpath_alone(self, two_wall_scenario):
        scenario, paths = two_wall_scenario
        rng = np.random.default_rng(0)
        # Find an iteration that sampled exactly one structure.
        while True:
            _, plan = run_iteration(scenario, paths, rng)
            if plan is not None and len(plan.structure_ids) == 1:
                break
        assembled = assemble_path(plan, paths, scenario.vehicle, closed_route=False)
        kinds = {w.kind for w in assembled.waypoints}
        assert "transit" not in kinds
        assert assembled.total_duration == pytest.approx(plan.t_total, abs=1e-6)

    def test_two_structures_structure_of_waypoints(self, two_wall_scenario):
        scenario, paths = two_wall_scenario
        scenario = scenario.with_mission(MissionConfig(
            t_max=1000.0, closed_route=False, iterations=1, rng_seed=0))
        rng = np.random.default_rng(2)
        while True:
            _, plan = run_iteration(scenario, paths, rng)
            if plan is not None and len(plan.structure_ids) == 2:
                break
        assembled = assemble_path(plan, paths, scenario.vehicle, closed_route=False)
        kinds = [w.kind for w in assembled.waypoints]
        assert kinds[0] == "start"
        assert kinds.count("transit") == 1
        closed = assemble_path(plan, paths, scenario.vehicle, closed_route=True)
        assert [w.kind for w in closed.waypoints].count("transit") == 2

    def test_duration_matches_independent_resum(self, two_wall_scenario):
        scenario, paths = two_wall_scenario
        result = run(scenario, paths)
        best, path = result.best, result.path
        assert best is not None and path is not None
        total = 0.0
        for a, b in zip(path.waypoints, path.waypoints[1:]):
            speed = (scenario.vehicle.v_inspect if b.kind == "inspect"
                     else scenario.vehicle.v_travel)
            total += travel_time(a.pose, b.pose, speed,
                                 scenario.vehicle.yaw_rate_max)
        assert total == pytest.approx(path.total_duration, abs=1e-6)
        assert path.total_duration == pytest.approx(best.t_total, abs=1e-6)
