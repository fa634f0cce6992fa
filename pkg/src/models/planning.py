"""Plan request, plan and planner configuration models."""

import math
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..belief.grid import BeliefMap
from ..belief.sensor import SensorModel
from ..geometry.bounds import Bounds
from ..geometry.footprint import CameraModel
from ..geometry.pose import Pose
from ..planning.rewards import DecayFunction
from .belief import BeliefMapDocument


class CameraConfig(BaseModel):
    """Fixed camera mounting, angles in degrees."""

    pitch_down_deg: float = Field(default=30.0, ge=0.0, le=90.0)
    hfov_deg: float = Field(default=36.9, gt=0.0, lt=180.0)
    vfov_deg: Optional[float] = Field(
        default=None, gt=0.0, lt=180.0, description="Defaults to the horizontal FOV"
    )
    max_range: float = Field(default=600.0, gt=0.0)

    def build(self) -> CameraModel:
        return CameraModel.from_degrees(
            self.pitch_down_deg, self.hfov_deg, self.vfov_deg, self.max_range
        )


class SensorConfig(BaseModel):
    """Detector lookup table as ``[range_m, tpr, tnr]`` rows."""

    breakpoints: List[Tuple[float, float, float]] = Field(
        default_factory=lambda: [(0.0, 0.9, 0.9), (200.0, 0.9, 0.9), (600.0, 0.5, 0.5)]
    )
    max_range: float = Field(default=600.0, gt=0.0)

    def build(self) -> SensorModel:
        return SensorModel(tuple(tuple(b) for b in self.breakpoints), self.max_range)  # type: ignore[arg-type]


class DecayConfig(BaseModel):
    """Time decay of rewards; the defaults disable it."""

    gamma: float = Field(default=1.0, ge=0.0, le=1.0, description="Floor value")
    beta: float = Field(default=0.0, le=0.0, description="Decay rate per second")

    def build(self) -> DecayFunction:
        return DecayFunction(self.gamma, self.beta)


class MctsConfig(BaseModel):
    """Monte Carlo tree search baseline settings."""

    exploration: float = Field(default=0.2, ge=0.0, description="UCB weight C")
    primitive_count: int = Field(default=7, ge=1)
    primitive_length: float = Field(default=250.0, gt=0.0)
    iterations: Optional[int] = Field(
        default=None, ge=0, description="Fixed iteration count, else wall clock"
    )


class PlannerConfig(BaseModel):
    """Knobs shared by every planner."""

    extend_distance: float = Field(default=1500.0, gt=0.0, description="Δ (m)")
    near_radius: float = Field(default=1500.0, gt=0.0, description="R (m)")
    prune_radius: float = Field(default=600.0, gt=0.0)
    planning_time: float = Field(default=10.0, ge=0.0, description="T (s)")
    budget: float = Field(default=15000.0, gt=0.0, description="B (m)")
    altitudes: List[float] = Field(default_factory=lambda: [50.0], min_length=1)
    turn_radius: float = Field(default=100.0, gt=0.0)
    speed: float = Field(default=25.0, gt=0.0)
    seed: int = 0
    iterations: Optional[int] = Field(
        default=None, ge=0, description="Loop iterations per cycle instead of wall clock"
    )
    horizon: Optional[float] = Field(
        default=None, gt=0.0, description="Plan length cap, full budget when unset"
    )
    closed_epsilon: float = Field(default=25.0, ge=0.0)
    use_embedding: bool = True
    recycle: bool = True
    waypoint_spacing: float = Field(default=50.0, gt=0.0)
    bounds_check_spacing: float = Field(default=1.0, gt=0.0)
    match_position_tol: float = Field(default=1.0, gt=0.0)
    match_heading_tol_deg: float = Field(default=5.0, gt=0.0)
    coverage_fraction: float = Field(default=0.2, ge=0.0, le=1.0)
    camera: CameraConfig = Field(default_factory=CameraConfig)
    sensor: SensorConfig = Field(default_factory=SensorConfig)
    decay: DecayConfig = Field(default_factory=DecayConfig)
    mcts: MctsConfig = Field(default_factory=MctsConfig)

    @field_validator("altitudes")
    @classmethod
    def _positive_altitudes(cls, value: List[float]) -> List[float]:
        if any(z <= 0.0 for z in value):
            raise ValueError("altitudes must be positive")
        return value

    def scaled(self, factor: float) -> "PlannerConfig":
        """Copy with every planar length multiplied by ``factor``."""
        return self.model_copy(
            update={
                "extend_distance": self.extend_distance * factor,
                "near_radius": self.near_radius * factor,
                "prune_radius": self.prune_radius * factor,
                "budget": self.budget * factor,
                "horizon": None if self.horizon is None else self.horizon * factor,
            }
        )


class PoseModel(BaseModel):
    x: float
    y: float
    z: float = Field(..., ge=0.0)
    psi: float = 0.0

    @classmethod
    def from_pose(cls, pose: Pose) -> "PoseModel":
        return cls(x=pose.x, y=pose.y, z=pose.z, psi=pose.psi)

    def to_pose(self) -> Pose:
        return Pose(self.x, self.y, self.z, self.psi)


class Waypoint(BaseModel):
    x: float
    y: float
    z: float
    psi: float
    cost: float = Field(..., description="Cumulative path length from the plan start (m)")
    info: float = Field(..., description="Predicted cumulative information")
    node: bool = Field(default=False, description="True where the planner had a tree node")

    @classmethod
    def at(cls, pose: Pose, cost: float, info: float, node: bool = False) -> "Waypoint":
        return cls(x=pose.x, y=pose.y, z=pose.z, psi=pose.psi, cost=cost, info=info, node=node)

    def pose(self) -> Pose:
        return Pose(self.x, self.y, max(0.0, self.z), self.psi)


class Plan(BaseModel):
    """Waypoint list emitted by a planner."""

    planner: str
    waypoints: List[Waypoint] = Field(..., min_length=1)
    total_info: float = 0.0

    @model_validator(mode="after")
    def _monotone_costs(self) -> "Plan":
        costs = [w.cost for w in self.waypoints]
        if any(b < a - 1e-9 for a, b in zip(costs, costs[1:])):
            raise ValueError("waypoint costs must be non-decreasing")
        return self

    @property
    def total_cost(self) -> float:
        return self.waypoints[-1].cost

    def node_indices(self) -> List[int]:
        return [i for i, w in enumerate(self.waypoints) if w.node]

    def poses(self) -> List[Pose]:
        return [w.pose() for w in self.waypoints]


class PlanRequest(BaseModel):
    """Everything a planner needs for one cycle."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    start: PoseModel
    budget: float = Field(..., gt=0.0)
    bounds: Bounds
    belief: BeliefMap
    config: Optional[PlannerConfig] = Field(
        default=None, description="Settings to build a planner for this request"
    )
    time_offset: float = Field(default=0.0, ge=0.0, description="Mission time at start (s)")

    @property
    def start_pose(self) -> Pose:
        return self.start.to_pose()


class PlanRequestDocument(BaseModel):
    """Serializable form of :class:`PlanRequest`."""

    start: PoseModel
    budget: float = Field(..., gt=0.0)
    bounds: Optional[Bounds] = Field(
        default=None, description="Defaults to the belief map extent"
    )
    belief: BeliefMapDocument
    config: PlannerConfig = Field(default_factory=PlannerConfig)
    time_offset: float = Field(default=0.0, ge=0.0)

    def to_request(self) -> PlanRequest:
        belief = BeliefMap.from_document(self.belief)
        bounds = self.bounds or Bounds.from_size(belief.width, belief.height, belief.origin)
        return PlanRequest(
            start=self.start,
            budget=self.budget,
            bounds=bounds,
            belief=belief,
            config=self.config,
            time_offset=self.time_offset,
        )


class CycleStats(BaseModel):
    """Bookkeeping for one planning cycle."""

    planner: str
    cycle: int
    iterations: int = 0
    tree_size: int = 0
    matched: bool = False
    recycled_nodes: int = 0
    build_time: float = 0.0
    update_time: float = 0.0
    info_evals: int = 0
    info_time: float = 0.0
    plan_info: float = 0.0
    plan_cost: float = 0.0

    @property
    def mean_info_time(self) -> float:
        return self.info_time / self.info_evals if self.info_evals else math.nan
