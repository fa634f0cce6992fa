"""Test configuration and fixtures."""

import os

os.environ.setdefault("IPP_ENVIRONMENT", "test")
os.environ.setdefault("IPP_LOG_LEVEL", "WARNING")

import numpy as np  # noqa: E402
import pytest  # noqa: E402
from fastapi.testclient import TestClient  # noqa: E402

from src.belief.grid import BeliefMap  # noqa: E402
from src.belief.sensor import SensorModel  # noqa: E402
from src.config import Settings  # noqa: E402
from src.geometry.bounds import Bounds  # noqa: E402
from src.geometry.footprint import CameraModel  # noqa: E402
from src.geometry.pose import Pose  # noqa: E402
from src.models.bench import CampaignConfig, EnvDistribution, EnvSpec, GaussianPrior  # noqa: E402
from src.models.mission import SimConfig  # noqa: E402
from src.models.planning import PlannerConfig, PlanRequest, PoseModel  # noqa: E402
from src.planning.rewards import RewardContext  # noqa: E402
from src.services.environment import Environment  # noqa: E402


@pytest.fixture
def test_settings():
    """Settings for the test environment."""
    return Settings(environment="test", output_dir="test-results", workers=1)


@pytest.fixture
def sensor():
    """Default detector: 0.9 out to 200 m, 0.5 at 600 m."""
    return SensorModel.default()


@pytest.fixture
def camera():
    """Forward camera pitched 30 degrees down with a 36.9 degree field of view."""
    return CameraModel.from_degrees()


@pytest.fixture
def nadir_camera():
    """Downward-looking camera with a square footprint."""
    return CameraModel.from_degrees(pitch_down=90.0)


@pytest.fixture
def small_map():
    """600 m square at 15 m cells, every cell at 0.5."""
    return BeliefMap.uniform(600.0, 600.0, 15.0, 0.5)


@pytest.fixture
def small_bounds(small_map):
    return Bounds.from_size(small_map.width, small_map.height)


@pytest.fixture
def reward_context(small_map, sensor):
    return RewardContext(base=small_map, model=sensor)


@pytest.fixture
def desk_planner_config():
    """Desk-scale tree settings with a fixed iteration count."""
    return PlannerConfig(
        extend_distance=300.0,
        near_radius=300.0,
        prune_radius=120.0,
        budget=1500.0,
        planning_time=1.0,
        iterations=60,
    )


@pytest.fixture
def blob_env():
    """1 km square with one tight cluster 500 m north of the default start."""
    spec = EnvSpec(
        bounds=Bounds.from_size(1000.0, 1000.0),
        cell_size=15.0,
        priors=[GaussianPrior(x=500.0, y=600.0, sigma=40.0, peak=0.9)],
        seed=3,
    )
    return Environment.from_spec(spec)


@pytest.fixture
def make_request():
    """Builds a plan request for a start pose and belief map."""

    def _make(belief, start, budget, bounds=None, time_offset=0.0):
        bounds = bounds or Bounds.from_size(belief.width, belief.height, belief.origin)
        return PlanRequest(
            start=PoseModel.from_pose(start),
            budget=budget,
            bounds=bounds,
            belief=belief,
            time_offset=time_offset,
        )

    return _make


@pytest.fixture
def tiny_campaign(tmp_path):
    """A campaign small enough to fly in a couple of seconds."""
    return CampaignConfig(
        planners=["tree", "greedy", "random", "coverage", "mcts"],
        trials=1,
        budgets=[600.0],
        width=600.0,
        height=600.0,
        cell_size=20.0,
        env=EnvDistribution(count_min=1, count_max=3, sigma_min=20.0, sigma_max=60.0),
        iterations=15,
        seed=11,
        workers=1,
        deterministic=True,
        output_dir=str(tmp_path / "out"),
        planner=PlannerConfig(
            extend_distance=200.0,
            near_radius=200.0,
            prune_radius=80.0,
            planning_time=2.0,
            budget=600.0,
            mcts={"primitive_length": 150.0, "iterations": 15},
        ),
        sim=SimConfig(dt=1.0),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def client():
    """Test client with the application lifespan running."""
    from src.main import app

    with TestClient(app) as test_client:
        yield test_client


@pytest.fixture
def start_pose():
    return Pose(300.0, 60.0, 50.0, np.pi / 2)
