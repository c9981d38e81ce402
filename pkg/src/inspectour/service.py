"""HTTP facade over the planning pipeline.

Request/response models are pydantic documents, so the wire format and
the on-disk format are identical. The handler functions run the actual
work and are callable directly; the CLI is a thin client over them, and
the FastAPI app exposes them to remote clients.
"""

from __future__ import annotations

from typing import Optional

import numpy as np
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, ConfigDict, Field

from . import __version__
from .coverage import CoverageError, plan_coverage
from .planner import run
from .reporting import build_report, timing_rows
from .scenario import PlacementError, builtin_archetypes, generate
from .schemas import (CoveragePathDocument, MissionDoc, PlanDocument,
                      RunReportDocument, ScenarioDocument, SensorDoc,
                      VehicleDoc, coverage_from_document, coverage_to_document,
                      plan_to_document, scenario_from_document,
                      scenario_to_document)

_SEED_MASK = 0xFFFFFFFFFFFFFFFF


class GenerateScenarioRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    count: int = Field(ge=1)
    bounds: tuple[float, float, float] = (200.0, 200.0, 50.0)
    margin: float = 5.0
    seed: int = 0
    archetype_names: Optional[list[str]] = None
    vehicle: Optional[VehicleDoc] = None
    sensor: Optional[SensorDoc] = None
    mission: Optional[MissionDoc] = None


class CoverageRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scenario: ScenarioDocument
    seed: int = 0
    structure_ids: Optional[list[str]] = None


class CoverageResponse(BaseModel):
    paths: list[CoveragePathDocument]


class PlanRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scenario: ScenarioDocument
    coverage_paths: list[CoveragePathDocument]
    t_max: Optional[float] = None
    iterations: Optional[int] = None
    seed: Optional[int] = None
    closed_route: Optional[bool] = None
    include_probability: Optional[float] = None


class IterationTimingDoc(BaseModel):
    iteration: int
    feasible: bool
    subset_sampling_s: float
    cost_matrix_s: float
    tsp_s: float
    time_sampling_s: float
    reward_s: float
    total_s: float


class PlanResponse(BaseModel):
    feasible: bool
    plan: Optional[PlanDocument]
    report: RunReportDocument
    timings: list[IterationTimingDoc]


def generate_scenario(request: GenerateScenarioRequest) -> ScenarioDocument:
    archetypes = builtin_archetypes()
    if request.archetype_names is not None:
        by_name = {a.name: a for a in archetypes}
        unknown = [n for n in request.archetype_names if n not in by_name]
        if unknown:
            raise ValueError(f"unknown archetypes: {', '.join(unknown)} "
                             f"(available: {', '.join(by_name)})")
        archetypes = tuple(by_name[n] for n in request.archetype_names)
    rng = np.random.default_rng(request.seed & _SEED_MASK)
    scenario = generate(
        archetypes, request.count, request.bounds, request.margin, rng,
        vehicle=request.vehicle.unwrap() if request.vehicle else None,
        sensor=request.sensor.unwrap() if request.sensor else None,
        mission=request.mission.unwrap() if request.mission else None,
    )
    return scenario_to_document(scenario)


def compute_coverage(request: CoverageRequest) -> CoverageResponse:
    scenario = scenario_from_document(request.scenario)
    wanted = set(request.structure_ids) if request.structure_ids is not None else None
    paths = []
    for index, structure in enumerate(scenario.structures):
        if wanted is not None and structure.id not in wanted:
            continue
        seed = int(np.random.default_rng(
            (request.seed & _SEED_MASK, index)).integers(0, 2**63))
        path = plan_coverage(structure, scenario.sensor, scenario.vehicle, seed)
        paths.append(coverage_to_document(path))
    return CoverageResponse(paths=paths)


def compute_plan(request: PlanRequest) -> PlanResponse:
    scenario = scenario_from_document(request.scenario)
    mission = scenario.mission
    overrides = {
        "t_max": request.t_max,
        "iterations": request.iterations,
        "rng_seed": request.seed,
        "closed_route": request.closed_route,
        "include_probability": request.include_probability,
    }
    mission = MissionDoc.wrap(mission).model_copy(
        update={k: v for k, v in overrides.items() if v is not None}).unwrap()
    scenario = scenario.with_mission(mission)

    structures = {s.id: s for s in scenario.structures}
    missing = [s.id for s in scenario.structures
               if s.id not in {d.structure_id for d in request.coverage_paths}]
    if missing:
        raise ValueError(f"missing coverage paths for: {', '.join(missing)}")
    coverage_paths = {}
    for doc in request.coverage_paths:
        if doc.structure_id not in structures:
            raise ValueError(f"coverage path for unknown structure "
                             f"{doc.structure_id!r}")
        coverage_paths[doc.structure_id] = coverage_from_document(
            doc, structures[doc.structure_id], scenario.vehicle)

    result = run(scenario, coverage_paths, mission)
    report = build_report(scenario, coverage_paths, result)
    timings = [IterationTimingDoc(**row) for row in timing_rows(result.history)]
    plan_doc = plan_to_document(result, mission) if result.best is not None else None
    return PlanResponse(feasible=result.best is not None, plan=plan_doc,
                        report=report, timings=timings)


def create_app() -> FastAPI:
    app = FastAPI(title="inspectour", version=__version__)

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/scenario/generate", response_model=ScenarioDocument)
    def scenario_generate(request: GenerateScenarioRequest) -> ScenarioDocument:
        try:
            return generate_scenario(request)
        except PlacementError as err:
            raise HTTPException(status_code=409, detail=str(err))
        except ValueError as err:
            raise HTTPException(status_code=422, detail=str(err))

    @app.post("/coverage/plan", response_model=CoverageResponse)
    def coverage_plan(request: CoverageRequest) -> CoverageResponse:
        try:
            return compute_coverage(request)
        except CoverageError as err:
            raise HTTPException(status_code=422, detail=str(err))
        except ValueError as err:
            raise HTTPException(status_code=422, detail=str(err))

    @app.post("/plan/compute", response_model=PlanResponse)
    def plan_compute(request: PlanRequest) -> PlanResponse:
        try:
            return compute_plan(request)
        except ValueError as err:
            raise HTTPException(status_code=422, detail=str(err))

    return app


app = create_app()
