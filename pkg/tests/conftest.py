import pytest

from inspectour.config import MissionConfig, SensorConfig, VehicleConfig
from inspectour.geometry import Pose
from inspectour.scenario import Scenario

from helpers import timed_path, wall_structure


@pytest.fixture
def vehicle():
    return VehicleConfig()


@pytest.fixture
def sensor():
    return SensorConfig()


@pytest.fixture
def two_wall_scenario(vehicle, sensor):
    """Two 3-panel walls 30 m apart with synthetic 3-point coverage cycles.

    Each coverage path has three viewpoints 2 m apart (2 s segments at
    inspection speed), each crediting two of the six wall faces.
    """
    a = wall_structure("wall-a", panels=3)
    b = wall_structure("wall-b", panels=3, offset=(30.0, 0.0, 0.0))
    scenario = Scenario(
        structures=(a, b),
        bounds=(100.0, 100.0, 50.0),
        vehicle=vehicle,
        sensor=sensor,
        mission=MissionConfig(t_max=14.0, closed_route=False, iterations=50,
                              rng_seed=11),
        margin=5.0,
    )
    paths = {}
    for s, x0 in ((a, 0.0), (b, 30.0)):
        poses = [Pose(x0 + 2.0 * k, -2.0, 0.5, 1.5707963267948966)
                 for k in range(3)]
        covered = [{2 * k, 2 * k + 1} for k in range(3)]
        paths[s.id] = timed_path(s.id, poses, covered, vehicle, is_cycle=True)
    return scenario, paths
