"""Iterative time-budgeted inspection planning over many structures.

Each iteration runs three randomized steps: sample a subset of the
structures, tour them with the asymmetric travel-time TSP, then sample
per-structure inspection times and coverage-path subsets that exactly
consume the remaining budget. The best iteration by total reward is kept
(anytime behavior); its subpaths and transit legs are finally assembled
into one flyable timed path.

Because a node's exit pose depends on the inspection time assigned at
that node, the cost matrix is built from the sampled entry poses first
and refined once with the realized subpath terminals. Iterations whose
final accounting still exceeds the budget are discarded, never repaired.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import TYPE_CHECKING, Mapping, Sequence

import numpy as np

from .config import MissionConfig, VehicleConfig
from .coverage import CoveragePath
from .geometry import Pose, Structure
from .motion import interpolate, travel_time
from .tsp import Tour, build_cost_matrix, solve_tsp, tour_cost

if TYPE_CHECKING:
    from .scenario import Scenario

# Slack absorbed by the segment walk before a partial segment is cut.
_TIME_EPS = 1e-9


@dataclass(frozen=True)
class PathSubset:
    """A consecutive slice of a coverage path, cut to an assigned duration.

    poses holds the entry viewpoint, every fully reached viewpoint, and
    (when the duration ends mid-segment) one interpolated terminal pose.
    Face credit covers fully reached viewpoints only; the interpolated
    terminal earns none.
    """

    structure_id: str
    entry_index: int
    duration: float
    poses: tuple[Pose, ...]
    segment_durations: tuple[float, ...]
    credited_faces: frozenset[int]

    @property
    def entry_pose(self) -> Pose:
        return self.poses[0]

    @property
    def terminal_pose(self) -> Pose:
        return self.poses[-1]


@dataclass(frozen=True)
class RewardBreakdown:
    """Covered area, coverage ratio and weighted reward for one structure."""

    covered_area: float
    ratio: float
    reward: float


@dataclass(frozen=True)
class SampledPlan:
    """One feasible iteration outcome: subset, tour, times, subsets, rewards.

    Parallel tuples are aligned with structure_ids (scenario order of the
    sampled subset); tour.order indexes into them.
    """

    iteration: int
    structure_ids: tuple[str, ...]
    tour: Tour
    entry_indices: tuple[int, ...]
    inspection_times: tuple[float, ...]
    subpaths: tuple[PathSubset, ...]
    rewards: tuple[RewardBreakdown, ...]
    r_total: float
    t_total: float

    @property
    def tour_ids(self) -> tuple[str, ...]:
        return tuple(self.structure_ids[i] for i in self.tour.order)


@dataclass
class StepTimings:
    """Wall-clock seconds spent in each iteration step."""

    subset_sampling: float = 0.0
    cost_matrix: float = 0.0
    tsp: float = 0.0
    time_sampling: float = 0.0
    reward: float = 0.0
    total: float = 0.0

    def step_sum(self) -> float:
        return (self.subset_sampling + self.cost_matrix + self.tsp
                + self.time_sampling + self.reward)


@dataclass(frozen=True)
class IterationRecord:
    """History entry for one iteration, feasible or not."""

    index: int
    feasible: bool
    r_total: float
    t_total: float
    tour_cost: float
    structure_count: int
    timings: StepTimings


@dataclass(frozen=True)
class TimedWaypoint:
    """One pose of the assembled path; kind labels the segment ending here."""

    pose: Pose
    t: float
    kind: str  # "start" | "inspect" | "transit"
    structure_id: str | None


@dataclass(frozen=True)
class AssembledPath:
    waypoints: tuple[TimedWaypoint, ...]
    total_duration: float


@dataclass(frozen=True)
class RunResult:
    best: SampledPlan | None
    path: AssembledPath | None
    history: tuple[IterationRecord, ...]

    @property
    def feasible_count(self) -> int:
        return sum(1 for rec in self.history if rec.feasible)


def sample_structure_subset(ids: Sequence[str], rng: np.random.Generator,
                            include_probability: float = 0.5) -> list[str]:
    """Nonempty random subset; each id kept independently, empty draws redone."""
    if len(ids) == 0:
        raise ValueError("cannot sample from an empty structure set")
    while True:
        mask = rng.random(len(ids)) < include_probability
        if mask.any():
            return [ids[i] for i in np.flatnonzero(mask)]


def fit_times_to_budget(raw: Sequence[float], caps: Sequence[float],
                        budget: float) -> list[float]:
    """Scale raw times so they sum to min(budget, sum(caps)), capping each.

    All entries are scaled by a common factor; entries hitting their cap
    are frozen and the surplus is redistributed proportionally among the
    rest, iterating to a fixpoint.
    """
    if budget < 0.0:
        raise ValueError(f"negative time budget: {budget}")
    caps_arr = np.asarray(caps, dtype=float)
    target = min(budget, float(caps_arr.sum()))
    times = np.minimum(np.asarray(raw, dtype=float), caps_arr)
    if target <= 0.0:
        return [0.0] * len(caps_arr)
    capped = np.zeros(len(caps_arr), dtype=bool)
    for _ in range(len(caps_arr) + 1):
        remaining = target - times[capped].sum()
        free = ~capped
        free_sum = times[free].sum()
        if remaining <= 0.0 or not free.any():
            times[free] = 0.0
            break
        if free_sum <= 0.0:
            # Degenerate zero draws: fall back to the caps as weights.
            times[free] = caps_arr[free]
            free_sum = times[free].sum()
        times[free] *= remaining / free_sum
        over = free & (times > caps_arr)
        if not over.any():
            break
        times[over] = caps_arr[over]
        capped |= over
    return [float(t) for t in times]


def assign_inspection_times(full_durations: Sequence[float], budget: float,
                            rng: np.random.Generator) -> list[float]:
    """Random inspection times summing to min(budget, sum(full_durations)).

    Raw times are drawn uniformly in [0, T_i] and then fitted to the
    budget; every result satisfies 0 <= t_i <= T_i. A negative budget
    (tour alone over the limit) is rejected.
    """
    if budget < 0.0:
        raise ValueError(f"negative time budget: {budget}")
    caps = np.asarray(full_durations, dtype=float)
    raw = rng.uniform(0.0, caps)
    return fit_times_to_budget(raw, caps, budget)


def available_duration(path: CoveragePath, entry_index: int) -> float:
    """Longest subpath duration extractable from this entry point."""
    if not (0 <= entry_index < path.point_count):
        raise IndexError(f"entry index {entry_index} out of range")
    if path.is_cycle:
        return path.total_duration
    return path.total_duration - path.cumulative_times[entry_index]


def extract_subpath(path: CoveragePath, entry_index: int,
                    duration: float) -> PathSubset:
    """Walk the coverage path from an entry point for a given duration.

    Wraps around on cyclic paths; ends with an interpolated pose when the
    duration runs out mid-segment. Raises when the duration exceeds what
    is reachable from the entry point (callers cap first).
    """
    if duration < 0.0:
        raise ValueError(f"duration must be >= 0, got {duration}")
    limit = available_duration(path, entry_index)
    if duration > limit + _TIME_EPS:
        raise ValueError(
            f"duration {duration:.6f}s exceeds reachable {limit:.6f}s from entry "
            f"{entry_index}")

    segments = path.segment_durations()
    m = path.point_count
    idx = entry_index
    remaining = min(duration, limit)
    poses = [path.points[idx].pose]
    credited = set(path.points[idx].covered_faces)
    seg_durations: list[float] = []
    for _ in range(m + 1):
        if remaining <= _TIME_EPS:
            break
        seg = segments[idx]
        if remaining >= seg - _TIME_EPS:
            nxt = (idx + 1) % m
            target = path.points[nxt]
            poses.append(target.pose)
            seg_durations.append(seg)
            credited |= target.covered_faces
            remaining -= seg
            idx = nxt
        else:
            nxt = (idx + 1) % m
            fraction = remaining / seg
            poses.append(interpolate(path.points[idx].pose,
                                     path.points[nxt].pose, fraction))
            seg_durations.append(remaining)
            remaining = 0.0
            break
    return PathSubset(
        structure_id=path.structure_id,
        entry_index=entry_index,
        duration=math.fsum(seg_durations),
        poses=tuple(poses),
        segment_durations=tuple(seg_durations),
        credited_faces=frozenset(credited),
    )


def compute_reward(structure: Structure, subpath: PathSubset,
                   coverable: frozenset[int]) -> RewardBreakdown:
    """Covered area, coverage ratio and weighted reward of a path subset.

    The denominator is the coverable area only, so a full coverage path
    always reaches ratio 1.
    """
    usable = subpath.credited_faces & coverable
    if usable:
        indices = np.fromiter(usable, dtype=int)
        covered = float(structure.mesh.face_areas[indices].sum())
    else:
        covered = 0.0
    if coverable:
        denom = float(structure.mesh.face_areas[np.fromiter(coverable, dtype=int)].sum())
        ratio = covered / denom if denom > 0.0 else 0.0
    else:
        ratio = 0.0
    return RewardBreakdown(covered_area=covered, ratio=ratio,
                           reward=structure.weight * covered)


def run_iteration(scenario: "Scenario",
                  coverage_paths: Mapping[str, CoveragePath],
                  rng: np.random.Generator,
                  index: int = 0) -> tuple[IterationRecord, SampledPlan | None]:
    """One sampling iteration; returns its history record and the plan.

    The plan is None when the iteration is infeasible (the sampled tour
    alone exceeds the budget, or the refined accounting lands beyond it).
    """
    mission = scenario.mission
    vehicle = scenario.vehicle
    timings = StepTimings()
    t_iter = time.perf_counter()

    t0 = time.perf_counter()
    subset = sample_structure_subset([s.id for s in scenario.structures], rng,
                                     mission.include_probability)
    timings.subset_sampling = time.perf_counter() - t0

    structures = {s.id: s for s in scenario.structures}
    paths = [coverage_paths[sid] for sid in subset]

    t0 = time.perf_counter()
    alphas = [int(rng.integers(path.point_count)) for path in paths]
    caps = np.array([available_duration(path, alpha)
                     for path, alpha in zip(paths, alphas)])
    raw = rng.uniform(0.0, caps)
    timings.time_sampling += time.perf_counter() - t0
    solver_seeds = [int(s) for s in rng.integers(0, 2**63, size=2)]

    entries = [path.points[alpha].pose for path, alpha in zip(paths, alphas)]
    exits = list(entries)
    tour: Tour | None = None
    times: list[float] = []
    subpaths: list[PathSubset] = []

    def finish(feasible: bool, plan: SampledPlan | None,
               cost: float, count: int) -> tuple[IterationRecord, SampledPlan | None]:
        timings.total = time.perf_counter() - t_iter
        record = IterationRecord(
            index=index, feasible=feasible,
            r_total=plan.r_total if plan else 0.0,
            t_total=plan.t_total if plan else 0.0,
            tour_cost=cost, structure_count=count, timings=timings)
        return record, plan

    # Entry poses are known up front; exit poses depend on the assigned
    # times, so build/solve/assign runs twice: once with exits guessed at
    # the entries, once refined with the realized subpath terminals.
    for attempt in range(2):
        t0 = time.perf_counter()
        matrix = build_cost_matrix(list(zip(entries, exits)), vehicle)
        timings.cost_matrix += time.perf_counter() - t0

        t0 = time.perf_counter()
        tour = solve_tsp(matrix, mission.closed_route, seed=solver_seeds[attempt])
        timings.tsp += time.perf_counter() - t0

        budget = mission.t_max - tour.cost
        if budget < 0.0:
            return finish(False, None, tour.cost, len(subset))

        t0 = time.perf_counter()
        times = fit_times_to_budget(raw, caps, budget)
        subpaths = [extract_subpath(path, alpha, t)
                    for path, alpha, t in zip(paths, alphas, times)]
        exits = [sp.terminal_pose for sp in subpaths]
        timings.time_sampling += time.perf_counter() - t0

    # Honest final accounting with the realized terminals.
    t0 = time.perf_counter()
    final_matrix = build_cost_matrix(list(zip(entries, exits)), vehicle)
    assert tour is not None
    transit = tour_cost(final_matrix.costs, tour.order, mission.closed_route)
    timings.cost_matrix += time.perf_counter() - t0

    durations = [sp.duration for sp in subpaths]
    t_total = math.fsum(durations) + transit
    if t_total > mission.t_max + _TIME_EPS:
        return finish(False, None, transit, len(subset))

    t0 = time.perf_counter()
    rewards = [compute_reward(structures[sid], sp, coverage_paths[sid].coverable_faces)
               for sid, sp in zip(subset, subpaths)]
    r_total = math.fsum(r.reward for r in rewards)
    timings.reward = time.perf_counter() - t0

    plan = SampledPlan(
        iteration=index,
        structure_ids=tuple(subset),
        tour=Tour(tour.order, transit, mission.closed_route),
        entry_indices=tuple(alphas),
        inspection_times=tuple(durations),
        subpaths=tuple(subpaths),
        rewards=tuple(rewards),
        r_total=r_total,
        t_total=t_total,
    )
    return finish(True, plan, transit, len(subset))


def run(scenario: "Scenario", coverage_paths: Mapping[str, CoveragePath],
        mission: MissionConfig | None = None) -> RunResult:
    """Run the full iteration loop and assemble the best plan found.

    Iterations restart independently on RNG streams derived from
    (seed, iteration index); the best feasible iteration by total reward
    wins, earliest index on ties. RunResult.best is None when no
    iteration was feasible.
    """
    if mission is None:
        mission = scenario.mission
    elif mission != scenario.mission:
        scenario = scenario.with_mission(mission)
    history: list[IterationRecord] = []
    best: SampledPlan | None = None
    seed = mission.rng_seed & 0xFFFFFFFFFFFFFFFF
    for k in range(mission.iterations):
        rng = np.random.default_rng((seed, k))
        record, plan = run_iteration(scenario, coverage_paths, rng, index=k)
        history.append(record)
        if plan is not None and (best is None or plan.r_total > best.r_total):
            best = plan
    path = None
    if best is not None:
        path = assemble_path(best, coverage_paths, scenario.vehicle,
                             mission.closed_route)
    return RunResult(best=best, path=path, history=tuple(history))


def assemble_path(best: SampledPlan, coverage_paths: Mapping[str, CoveragePath],
                  vehicle: VehicleConfig, closed_route: bool) -> AssembledPath:
    """Concatenate the best plan's subpaths with transit legs, in tour order.

    Transit legs fly at v_travel, inspection segments at v_inspect. A
    closed route appends the return leg to the first entry pose (only
    when the tour has more than one node, matching the tour cost).
    """
    waypoints: list[TimedWaypoint] = []
    t = 0.0
    previous_terminal: Pose | None = None
    ordered = [(best.structure_ids[i], best.subpaths[i]) for i in best.tour.order]
    for sid, subpath in ordered:
        if previous_terminal is None:
            waypoints.append(TimedWaypoint(subpath.entry_pose, 0.0, "start", sid))
        else:
            t += travel_time(previous_terminal, subpath.entry_pose,
                             vehicle.v_travel, vehicle.yaw_rate_max)
            waypoints.append(TimedWaypoint(subpath.entry_pose, t, "transit", None))
        for pose, duration in zip(subpath.poses[1:], subpath.segment_durations):
            t += duration
            waypoints.append(TimedWaypoint(pose, t, "inspect", sid))
        previous_terminal = subpath.terminal_pose
    if closed_route and len(ordered) > 1:
        first_entry = ordered[0][1].entry_pose
        t += travel_time(previous_terminal, first_entry, vehicle.v_travel,
                         vehicle.yaw_rate_max)
        waypoints.append(TimedWaypoint(first_entry, t, "transit", None))
    return AssembledPath(waypoints=tuple(waypoints), total_duration=t)
