"""Run summaries and plot-ready tables.

The run report aggregates the best plan against the whole scenario:
per-structure coverage, percentage of structures visited, percentage of
the available reward collected, and the iteration history. Wall-clock
step timings are deliberately kept out of the report document (they are
not reproducible across runs) and are emitted as a separate table.
"""

from __future__ import annotations

import math
from typing import Mapping, Sequence

import numpy as np

from .coverage import CoveragePath, coverable_area
from .geometry import Structure
from .planner import IterationRecord, RunResult
from .scenario import Scenario
from .schemas import (ReportIterationDoc, ReportStructureDoc,
                      RunReportDocument)

TIMING_FIELDS = ("subset_sampling", "cost_matrix", "tsp", "time_sampling", "reward")


def structure_centroid(structure: Structure) -> np.ndarray:
    """Area-weighted surface centroid of the structure's mesh."""
    mesh = structure.mesh
    return np.average(mesh.face_centroids, axis=0, weights=mesh.face_areas)


def mean_pairwise_distance(structures: Sequence[Structure]) -> float:
    """Mean distance over all structure pairs (area-weighted centroids).

    This is the all-pairs convention; a single structure yields 0.
    """
    if len(structures) < 2:
        return 0.0
    centers = np.array([structure_centroid(s) for s in structures])
    total = 0.0
    pairs = 0
    for i in range(len(centers)):
        for j in range(i + 1, len(centers)):
            total += float(np.linalg.norm(centers[i] - centers[j]))
            pairs += 1
    return total / pairs


def build_report(scenario: Scenario,
                 coverage_paths: Mapping[str, CoveragePath],
                 result: RunResult) -> RunReportDocument:
    best = result.best
    mission = scenario.mission

    by_id: dict[str, tuple[int, float]] = {}
    if best is not None:
        for i, sid in enumerate(best.structure_ids):
            by_id[sid] = (i, best.inspection_times[i])

    per_structure: list[ReportStructureDoc] = []
    total_available_reward = 0.0
    total_coverable = 0.0
    total_covered = 0.0
    for s in scenario.structures:
        area = coverable_area(s, coverage_paths[s.id])
        total_available_reward += s.weight * area
        total_coverable += area
        if best is not None and s.id in by_id:
            i, t_i = by_id[s.id]
            reward = best.rewards[i]
            per_structure.append(ReportStructureDoc(
                id=s.id, weight=s.weight, coverable_area=area, sampled=True,
                inspection_time=t_i, covered_area=reward.covered_area,
                coverage_ratio=reward.ratio, reward=reward.reward))
            total_covered += reward.covered_area
        else:
            per_structure.append(ReportStructureDoc(
                id=s.id, weight=s.weight, coverable_area=area, sampled=False,
                inspection_time=0.0, covered_area=0.0, coverage_ratio=0.0,
                reward=0.0))

    n = len(scenario.structures)
    visited = len(best.structure_ids) if best is not None else 0
    r_total = best.r_total if best is not None else 0.0
    return RunReportDocument(
        structure_count=n,
        t_max=mission.t_max,
        closed_route=mission.closed_route,
        rng_seed=mission.rng_seed,
        iterations_requested=mission.iterations,
        feasible_iterations=result.feasible_count,
        feasible=best is not None,
        best_iteration=best.iteration if best is not None else None,
        r_total=r_total,
        t_total=best.t_total if best is not None else 0.0,
        tour_cost=best.tour.cost if best is not None else 0.0,
        visited_percent=100.0 * visited / n if n else 0.0,
        reward_percent=(100.0 * r_total / total_available_reward
                        if total_available_reward > 0.0 else 0.0),
        coverage_percent=(100.0 * total_covered / total_coverable
                          if total_coverable > 0.0 else 0.0),
        mean_pairwise_distance=mean_pairwise_distance(scenario.structures),
        per_structure=per_structure,
        iteration_history=[
            ReportIterationDoc(index=rec.index, feasible=rec.feasible,
                               r_total=rec.r_total, t_total=rec.t_total,
                               tour_cost=rec.tour_cost,
                               structure_count=rec.structure_count)
            for rec in result.history
        ],
    )


def timing_rows(history: Sequence[IterationRecord]) -> list[dict]:
    """Per-iteration wall-clock breakdown, one dict per iteration."""
    rows = []
    for rec in history:
        row = {"iteration": rec.index, "feasible": rec.feasible}
        for name in TIMING_FIELDS:
            row[f"{name}_s"] = getattr(rec.timings, name)
        row["total_s"] = rec.timings.total
        rows.append(row)
    return rows


def tsp_time_fraction(history: Sequence[IterationRecord]) -> float:
    """Share of the per-iteration wall clock spent in the tour solver."""
    total = math.fsum(rec.timings.total for rec in history)
    if total <= 0.0:
        return 0.0
    return math.fsum(rec.timings.tsp for rec in history) / total
