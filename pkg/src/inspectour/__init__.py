"""Time-budgeted inspection route planning over distributed 3D structures."""

__version__ = "0.1.0"

from .config import MissionConfig, SensorConfig, VehicleConfig
from .coverage import CoverageError, CoveragePath, Viewpoint, plan_coverage
from .geometry import (MeshError, Pose, Structure, TriMesh, angular_distance,
                       mesh_area, normalize_yaw)
from .motion import TimedSegment, interpolate, travel_time
from .planner import (AssembledPath, IterationRecord, RunResult, SampledPlan,
                      assemble_path, assign_inspection_times, compute_reward,
                      extract_subpath, run, run_iteration,
                      sample_structure_subset)
from .scenario import (Archetype, PlacementError, Scenario, builtin_archetypes,
                       generate, validate_scenario)
from .tsp import CostMatrix, Tour, brute_force_tsp, build_cost_matrix, solve_tsp

__all__ = [
    "__version__",
    "MissionConfig", "SensorConfig", "VehicleConfig",
    "CoverageError", "CoveragePath", "Viewpoint", "plan_coverage",
    "MeshError", "Pose", "Structure", "TriMesh", "angular_distance",
    "mesh_area", "normalize_yaw",
    "TimedSegment", "interpolate", "travel_time",
    "AssembledPath", "IterationRecord", "RunResult", "SampledPlan",
    "assemble_path", "assign_inspection_times", "compute_reward",
    "extract_subpath", "run", "run_iteration", "sample_structure_subset",
    "Archetype", "PlacementError", "Scenario", "builtin_archetypes",
    "generate", "validate_scenario",
    "CostMatrix", "Tour", "brute_force_tsp", "build_cost_matrix", "solve_tsp",
]
