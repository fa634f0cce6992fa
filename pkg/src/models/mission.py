"""Mission simulation settings and reports."""

from typing import List, Optional

from pydantic import BaseModel, Field

from .belief import BeliefMapDocument
from .planning import CycleStats, PoseModel


class SimConfig(BaseModel):
    """Vehicle, controller and replanning settings for one mission."""

    dt: float = Field(default=0.5, gt=0.0, description="Simulation tick (s)")
    speed: float = Field(default=25.0, gt=0.0, description="Constant airspeed (m/s)")
    acceptance_radius: float = Field(default=20.0, gt=0.0, description="Waypoint switch radius (m)")
    banking_threshold_deg: float = Field(
        default=15.0, ge=0.0, description="Heading change between waypoints that suppresses observations"
    )
    heading_gain: float = Field(default=1.0, gt=0.0, description="Heading P gain (1/s)")
    altitude_gain: float = Field(default=0.5, gt=0.0, description="Altitude P gain (1/s)")
    max_climb_rate: float = Field(default=5.0, gt=0.0, description="m/s")
    turn_radius: float = Field(default=100.0, gt=0.0)
    replan: bool = Field(default=True, description="Ask adaptive planners for new plans in flight")
    replan_period: Optional[float] = Field(
        default=None, gt=0.0, description="Seconds between requests, planning time when unset"
    )
    horizon: Optional[float] = Field(
        default=None, gt=0.0, description="Cap on the budget handed to each request (m)"
    )
    time_multiplier: float = Field(default=2.0, gt=0.0, description="Simulated seconds per wall second")
    deterministic: bool = Field(
        default=True, description="Plan on the simulated clock instead of a worker thread"
    )
    start: Optional[PoseModel] = Field(
        default=None, description="Start pose, bottom edge center heading north when unset"
    )


class TraceRow(BaseModel):
    t: float
    entropy_bits: float
    pct_reduction: float
    x: float
    y: float
    z: float
    psi: float


class MissionReport(BaseModel):
    """Outcome of one simulated mission."""

    planner: str
    seed: int
    budget: float
    initial_entropy: float = 0.0
    final_entropy: float = 0.0
    final_reduction: float = Field(default=0.0, description="Percent entropy reduction")
    weighted_information: float = Field(
        default=0.0, description="Priority-weighted entropy drop over the mission (bits)"
    )
    distance_flown: float = 0.0
    duration: float = 0.0
    replans: int = 0
    replan_failures: int = 0
    off_plan_merges: int = 0
    observed_cells: int = 0
    clusters_touched: Optional[int] = None
    trace: List[TraceRow] = Field(default_factory=list)
    cycles: List[CycleStats] = Field(default_factory=list)
    final_belief: Optional[BeliefMapDocument] = None
    failed: bool = False
    error: Optional[str] = None

    def summary(self) -> dict:
        """Report without the trace and belief map."""
        return self.model_dump(exclude={"trace", "final_belief"})
