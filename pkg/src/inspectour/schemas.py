"""Typed documents for every persisted artifact and service payload.

All documents are JSON with a versioned schema tag, declared field order
(so serialization is deterministic and files diff cleanly) and SI units
throughout. Converters translate between documents and the runtime
types.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from .config import MissionConfig, SensorConfig, VehicleConfig
from .coverage import CoveragePath, ingest_coverage_path
from .geometry import Pose, Structure, TriMesh
from .planner import RunResult
from .scenario import Scenario

SCENARIO_SCHEMA = "inspectour.scenario/v1"
COVERAGE_SCHEMA = "inspectour.coverage-path/v1"
PLAN_SCHEMA = "inspectour.plan/v1"
REPORT_SCHEMA = "inspectour.report/v1"
PROTOCOL_SCHEMA = "inspectour.protocol/v1"


class _Doc(BaseModel):
    model_config = ConfigDict(extra="forbid")


class VehicleDoc(_Doc):
    v_travel: float
    v_inspect: float
    yaw_rate_max: float

    @classmethod
    def wrap(cls, cfg: VehicleConfig) -> "VehicleDoc":
        return cls(v_travel=cfg.v_travel, v_inspect=cfg.v_inspect,
                   yaw_rate_max=cfg.yaw_rate_max)

    def unwrap(self) -> VehicleConfig:
        return VehicleConfig(self.v_travel, self.v_inspect, self.yaw_rate_max)


class SensorDoc(_Doc):
    fov_h: float
    fov_v: float
    range_min: float
    range_max: float
    camera_pitch: float = 0.0
    incidence_max: float = Field(default_factory=lambda: SensorConfig().incidence_max)

    @classmethod
    def wrap(cls, cfg: SensorConfig) -> "SensorDoc":
        return cls(fov_h=cfg.fov_h, fov_v=cfg.fov_v, range_min=cfg.range_min,
                   range_max=cfg.range_max, camera_pitch=cfg.camera_pitch,
                   incidence_max=cfg.incidence_max)

    def unwrap(self) -> SensorConfig:
        return SensorConfig(self.fov_h, self.fov_v, self.range_min,
                            self.range_max, self.camera_pitch, self.incidence_max)


class MissionDoc(_Doc):
    t_max: float
    closed_route: bool = True
    iterations: int = 30
    rng_seed: int = 0
    include_probability: float = 0.5

    @classmethod
    def wrap(cls, cfg: MissionConfig) -> "MissionDoc":
        return cls(t_max=cfg.t_max, closed_route=cfg.closed_route,
                   iterations=cfg.iterations, rng_seed=cfg.rng_seed,
                   include_probability=cfg.include_probability)

    def unwrap(self) -> MissionConfig:
        return MissionConfig(self.t_max, self.closed_route, self.iterations,
                             self.rng_seed, self.include_probability)


class StructureDoc(_Doc):
    id: str
    weight: float
    archetype: Optional[str] = None
    vertices: list[tuple[float, float, float]]
    faces: list[tuple[int, int, int]]


class ScenarioDocument(_Doc):
    schema_version: Literal["inspectour.scenario/v1"] = SCENARIO_SCHEMA
    bounds: tuple[float, float, float]
    margin: float
    vehicle: VehicleDoc
    sensor: SensorDoc
    mission: MissionDoc
    structures: list[StructureDoc]


class CoveragePointDoc(_Doc):
    x: float
    y: float
    z: float
    psi: float
    cumulative_time: float
    covered_faces: list[int]
    generating_face: Optional[int] = None


class CoveragePathDocument(_Doc):
    schema_version: Literal["inspectour.coverage-path/v1"] = COVERAGE_SCHEMA
    structure_id: str
    is_cycle: bool
    total_duration: float
    coverable_faces: list[int]
    points: list[CoveragePointDoc]


class PlanStructureDoc(_Doc):
    """Per-structure outcome of the best plan, listed in tour order."""

    id: str
    entry_index: int
    inspection_time: float
    covered_area: float
    coverage_ratio: float
    reward: float


class WaypointDoc(_Doc):
    x: float
    y: float
    z: float
    psi: float
    t: float
    kind: Literal["start", "inspect", "transit"]
    structure_id: Optional[str] = None


class PlanDocument(_Doc):
    schema_version: Literal["inspectour.plan/v1"] = PLAN_SCHEMA
    t_max: float
    closed_route: bool
    rng_seed: int
    iterations: int
    best_iteration: int
    r_total: float
    t_total: float
    tour_cost: float
    structures: list[PlanStructureDoc]
    waypoints: list[WaypointDoc]


class ReportStructureDoc(_Doc):
    id: str
    weight: float
    coverable_area: float
    sampled: bool
    inspection_time: float
    covered_area: float
    coverage_ratio: float
    reward: float


class ReportIterationDoc(_Doc):
    index: int
    feasible: bool
    r_total: float
    t_total: float
    tour_cost: float
    structure_count: int


class RunReportDocument(_Doc):
    schema_version: Literal["inspectour.report/v1"] = REPORT_SCHEMA
    structure_count: int
    t_max: float
    closed_route: bool
    rng_seed: int
    iterations_requested: int
    feasible_iterations: int
    feasible: bool
    best_iteration: Optional[int]
    r_total: float
    t_total: float
    tour_cost: float
    visited_percent: float
    reward_percent: float
    coverage_percent: float
    mean_pairwise_distance: float
    per_structure: list[ReportStructureDoc]
    iteration_history: list[ReportIterationDoc]


class ProtocolCaseDoc(_Doc):
    count: int = Field(ge=1)
    seeds: list[int] = Field(min_length=1)


class ProtocolDocument(_Doc):
    """Batch experiment description: one run per (case, seed)."""

    schema_version: Literal["inspectour.protocol/v1"] = PROTOCOL_SCHEMA
    bounds: tuple[float, float, float] = (200.0, 200.0, 50.0)
    margin: float = 5.0
    t_max: float = 1800.0
    iterations: int = 30
    closed_route: bool = True
    include_probability: float = 0.5
    cases: list[ProtocolCaseDoc] = Field(min_length=1)


# ---------------------------------------------------------------------------
# runtime <-> document conversion

def scenario_to_document(scenario: Scenario) -> ScenarioDocument:
    return ScenarioDocument(
        bounds=scenario.bounds,
        margin=scenario.margin,
        vehicle=VehicleDoc.wrap(scenario.vehicle),
        sensor=SensorDoc.wrap(scenario.sensor),
        mission=MissionDoc.wrap(scenario.mission),
        structures=[
            StructureDoc(
                id=s.id,
                weight=s.weight,
                archetype=s.archetype,
                vertices=[tuple(v) for v in s.mesh.vertices.tolist()],
                faces=[tuple(f) for f in s.mesh.faces.tolist()],
            )
            for s in scenario.structures
        ],
    )


def scenario_from_document(doc: ScenarioDocument) -> Scenario:
    structures = tuple(
        Structure(id=sd.id, mesh=TriMesh(sd.vertices, sd.faces),
                  weight=sd.weight, archetype=sd.archetype)
        for sd in doc.structures
    )
    return Scenario(
        structures=structures,
        bounds=doc.bounds,
        vehicle=doc.vehicle.unwrap(),
        sensor=doc.sensor.unwrap(),
        mission=doc.mission.unwrap(),
        margin=doc.margin,
    )


def coverage_to_document(path: CoveragePath) -> CoveragePathDocument:
    return CoveragePathDocument(
        structure_id=path.structure_id,
        is_cycle=path.is_cycle,
        total_duration=path.total_duration,
        coverable_faces=sorted(path.coverable_faces),
        points=[
            CoveragePointDoc(
                x=vp.pose.x, y=vp.pose.y, z=vp.pose.z, psi=vp.pose.psi,
                cumulative_time=t,
                covered_faces=sorted(vp.covered_faces),
                generating_face=vp.generating_face,
            )
            for vp, t in zip(path.points, path.cumulative_times)
        ],
    )


def coverage_from_document(doc: CoveragePathDocument, structure: Structure,
                           vehicle: VehicleConfig) -> CoveragePath:
    """Rebuild a runtime coverage path, re-timing against the motion model."""
    if doc.structure_id != structure.id:
        raise ValueError(
            f"coverage path is for {doc.structure_id!r}, not {structure.id!r}")
    return ingest_coverage_path(
        structure,
        poses=[Pose(p.x, p.y, p.z, p.psi) for p in doc.points],
        cumulative_times=[p.cumulative_time for p in doc.points],
        covered_faces=[p.covered_faces for p in doc.points],
        vehicle=vehicle,
        generating_faces=[p.generating_face for p in doc.points],
        is_cycle=doc.is_cycle,
        coverable_faces=doc.coverable_faces,
    )


def plan_to_document(result: RunResult, mission: MissionConfig) -> PlanDocument:
    best = result.best
    path = result.path
    if best is None or path is None:
        raise ValueError("cannot serialize an infeasible run as a plan")
    per_structure = []
    for i in best.tour.order:
        per_structure.append(PlanStructureDoc(
            id=best.structure_ids[i],
            entry_index=best.entry_indices[i],
            inspection_time=best.inspection_times[i],
            covered_area=best.rewards[i].covered_area,
            coverage_ratio=best.rewards[i].ratio,
            reward=best.rewards[i].reward,
        ))
    return PlanDocument(
        t_max=mission.t_max,
        closed_route=mission.closed_route,
        rng_seed=mission.rng_seed,
        iterations=mission.iterations,
        best_iteration=best.iteration,
        r_total=best.r_total,
        t_total=best.t_total,
        tour_cost=best.tour.cost,
        structures=per_structure,
        waypoints=[
            WaypointDoc(x=w.pose.x, y=w.pose.y, z=w.pose.z, psi=w.pose.psi,
                        t=w.t, kind=w.kind, structure_id=w.structure_id)
            for w in path.waypoints
        ],
    )
