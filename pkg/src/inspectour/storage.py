"""Reading and writing every on-disk artifact.

All documents are JSON (stable field order, two-space indent, trailing
newline) so identical inputs produce byte-identical files. Tabular plot
data is CSV. Schema violations surface as SchemaError with the offending
field paths.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Mapping, Sequence, Type, TypeVar

from pydantic import BaseModel, ValidationError

from .motion import travel_time
from .schemas import (CoveragePathDocument, PlanDocument, ProtocolDocument,
                      RunReportDocument, ScenarioDocument)

D = TypeVar("D", bound=BaseModel)


class SchemaError(ValueError):
    """A file failed structural validation; message lists field paths."""


def _validation_message(path: Path, err: ValidationError) -> str:
    details = []
    for item in err.errors():
        loc = ".".join(str(part) for part in item["loc"]) or "<root>"
        details.append(f"{loc}: {item['msg']}")
    return f"{path}: " + "; ".join(details)


def write_document(doc: BaseModel, path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = json.dumps(doc.model_dump(mode="json"), indent=2)
    path.write_text(payload + "\n")
    return path


def read_document(path: Path | str, model: Type[D]) -> D:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError:
        raise SchemaError(f"{path}: file not found") from None
    except json.JSONDecodeError as err:
        raise SchemaError(f"{path}: not valid JSON ({err})") from None
    try:
        return model.model_validate(raw)
    except ValidationError as err:
        raise SchemaError(_validation_message(path, err)) from None


def write_scenario(doc: ScenarioDocument, path: Path | str) -> Path:
    return write_document(doc, path)


def read_scenario(path: Path | str) -> ScenarioDocument:
    return read_document(path, ScenarioDocument)


def write_coverage_path(doc: CoveragePathDocument, path: Path | str) -> Path:
    return write_document(doc, path)


def read_coverage_path(path: Path | str) -> CoveragePathDocument:
    return read_document(path, CoveragePathDocument)


def write_plan(doc: PlanDocument, path: Path | str) -> Path:
    return write_document(doc, path)


def read_plan(path: Path | str) -> PlanDocument:
    return read_document(path, PlanDocument)


def write_report(doc: RunReportDocument, path: Path | str) -> Path:
    return write_document(doc, path)


def read_report(path: Path | str) -> RunReportDocument:
    return read_document(path, RunReportDocument)


def read_protocol(path: Path | str) -> ProtocolDocument:
    return read_document(path, ProtocolDocument)


def write_protocol(doc: ProtocolDocument, path: Path | str) -> Path:
    return write_document(doc, path)


def retime_plan(plan: PlanDocument, scenario: ScenarioDocument,
                tolerance: float = 1e-6) -> float:
    """Independently re-time the stored path with the motion model.

    Each waypoint's stored arrival time must match the travel time of the
    segment ending there at the labeled speed limit. Returns the re-timed
    total duration; raises SchemaError on any inconsistency.
    """
    from .geometry import Pose  # local import keeps module load light

    vehicle = scenario.vehicle.unwrap()
    if not plan.waypoints:
        raise SchemaError("plan has no waypoints")
    first = plan.waypoints[0]
    if first.kind != "start" or first.t != 0.0:
        raise SchemaError("plan must begin with a 'start' waypoint at t = 0")
    total = 0.0
    previous = Pose(first.x, first.y, first.z, first.psi)
    previous_t = 0.0
    for k, wp in enumerate(plan.waypoints[1:], start=1):
        pose = Pose(wp.x, wp.y, wp.z, wp.psi)
        speed = vehicle.v_inspect if wp.kind == "inspect" else vehicle.v_travel
        expected = travel_time(previous, pose, speed, vehicle.yaw_rate_max)
        stored = wp.t - previous_t
        if abs(stored - expected) > tolerance:
            raise SchemaError(
                f"waypoint {k}: stored segment duration {stored:.9f}s deviates "
                f"from re-timed {expected:.9f}s")
        total += expected
        previous = pose
        previous_t = wp.t
    return total


def validate_plan_budget(plan: PlanDocument, scenario: ScenarioDocument,
                         tolerance: float = 1e-6) -> float:
    """Re-time the plan and confirm it fits the mission budget."""
    total = retime_plan(plan, scenario, tolerance)
    if total > plan.t_max + tolerance:
        raise SchemaError(
            f"re-timed plan duration {total:.6f}s exceeds t_max {plan.t_max}s")
    return total


def write_csv(rows: Sequence[Mapping], path: Path | str,
              fieldnames: Sequence[str] | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fieldnames is None:
        if not rows:
            raise ValueError("cannot infer CSV columns from zero rows")
        fieldnames = list(rows[0].keys())
    with path.open("w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=fieldnames)
        writer.writeheader()
        writer.writerows(rows)
    return path


def write_timings_csv(timing_rows: Sequence[Mapping], path: Path | str) -> Path:
    return write_csv(timing_rows, path)


def emit_plot_data(report: RunReportDocument, timing_rows: Sequence[Mapping],
                   out_dir: Path | str) -> list[Path]:
    """Write the per-run plot tables: timing breakdown and coverage."""
    out_dir = Path(out_dir)
    return [
        write_timings_csv(timing_rows, out_dir / "timings.csv"),
        write_structure_coverage_csv(report, out_dir / "structure_coverage.csv"),
    ]


def write_structure_coverage_csv(report: RunReportDocument,
                                 path: Path | str) -> Path:
    rows = [
        {
            "structure_id": s.id,
            "weight": s.weight,
            "coverable_area_m2": s.coverable_area,
            "sampled": s.sampled,
            "covered_area_m2": s.covered_area,
            "coverage_percent": 100.0 * s.coverage_ratio,
            "reward": s.reward,
        }
        for s in report.per_structure
    ]
    return write_csv(rows, path)


def aggregate_coverage_rows(per_count: Mapping[int, Sequence[RunReportDocument]]
                            ) -> list[dict]:
    """One mean-coverage row per structure count, for trend plots."""
    rows = []
    for count in sorted(per_count):
        reports = per_count[count]
        rows.append({
            "structure_count": count,
            "runs": len(reports),
            "mean_coverage_percent": _mean(r.coverage_percent for r in reports),
            "mean_visited_percent": _mean(r.visited_percent for r in reports),
            "mean_reward_percent": _mean(r.reward_percent for r in reports),
        })
    return rows


def _mean(values) -> float:
    values = list(values)
    return math.fsum(values) / len(values) if values else 0.0
