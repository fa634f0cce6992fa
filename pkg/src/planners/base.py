"""Base planner interface shared by the tree planner and the baselines."""

import logging
import math
from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..belief.grid import BeliefMap
from ..geometry.footprint import edge_footprint
from ..geometry.paths import EdgeGeometry
from ..geometry.pose import Pose
from ..models.planning import CycleStats, Plan, PlannerConfig, PlanRequest, Waypoint
from ..planning.rewards import RewardContext, score_cells

logger = logging.getLogger(__name__)

# (geometry, cumulative info when the leg ends)
Leg = Tuple[EdgeGeometry, float]


class BasePlanner(ABC):
    """Base class for planners.

    Subclasses set ``name`` and implement :meth:`plan`. ``adaptive`` planners
    are asked for a new plan every replanning period during a mission; the
    others fly one plan to the end.
    """

    name: str = "base"
    adaptive: bool = True

    def __init__(self, config: Optional[PlannerConfig] = None) -> None:
        """Initialize planner.

        Args:
            config: Planner knobs; camera, sensor and decay are built from it
        """
        self.config = config or PlannerConfig()
        self.camera = self.config.camera.build()
        self.sensor = self.config.sensor.build()
        self.decay = self.config.decay.build()
        self.rng = np.random.default_rng(self.config.seed)
        self.stats: List[CycleStats] = []

    @abstractmethod
    def plan(self, request: PlanRequest) -> Plan:
        """Compute a plan for one cycle.

        Args:
            request: Start pose, budget, belief snapshot and bounds

        Returns:
            Waypoints with cumulative cost and predicted information

        Raises:
            PlannerError: If the request cannot be planned
        """

    def reset(self) -> None:
        """Forget state carried between cycles."""
        self.rng = np.random.default_rng(self.config.seed)
        self.stats = []

    def budget_for(self, request: PlanRequest) -> float:
        """Request budget capped by the planning horizon."""
        horizon = self.config.horizon
        return request.budget if horizon is None else min(request.budget, horizon)

    def context(self, request: PlanRequest) -> RewardContext:
        return RewardContext(
            base=request.belief,
            model=self.sensor,
            decay=self.decay,
            speed=self.config.speed,
            time_offset=request.time_offset,
        )

    def check_request(self, request: PlanRequest) -> None:
        start = request.start_pose
        if not request.bounds.contains(start.x, start.y):
            raise PlannerError(
                f"start ({start.x:.1f}, {start.y:.1f}) outside search bounds",
                self.name,
                "START_OUT_OF_BOUNDS",
                {"bounds": request.bounds.model_dump()},
            )
        if start.z <= 0.0:
            raise PlannerError(
                f"start altitude must be positive, got {start.z}",
                self.name,
                "INVALID_REQUEST",
            )

    def build_plan(
        self, start: Pose, legs: Sequence[Leg], start_info: float = 0.0
    ) -> Plan:
        """Densify legs into a waypoint list.

        Waypoints are placed every ``waypoint_spacing`` metres; leg ends are
        flagged as nodes and carry the leg's cumulative info, points inside
        a leg carry the info reached at its start.
        """
        spacing = self.config.waypoint_spacing
        waypoints = [Waypoint.at(start, 0.0, start_info, node=True)]
        cost = 0.0
        info = start_info
        for edge, info_after in legs:
            length = edge.length
            if length <= 0.0:
                continue
            count = max(1, int(math.ceil(length / spacing - 1e-9)))
            s = np.linspace(0.0, length, count + 1)[1:]
            xs, ys, zs, psis = edge.states(s)
            for k in range(count):
                last = k == count - 1
                pose = Pose(float(xs[k]), float(ys[k]), max(0.0, float(zs[k])), float(psis[k]))
                waypoints.append(
                    Waypoint.at(
                        pose,
                        cost + float(s[k]),
                        info_after if last else info,
                        node=last,
                    )
                )
            cost += length
            info = info_after
        return Plan(planner=self.name, waypoints=waypoints, total_info=info)

    def degenerate_plan(self, request: PlanRequest, info: float = 0.0) -> Plan:
        """A plan that stays at the start pose."""
        return self.build_plan(request.start_pose, [], info)

    def leg_gain(
        self,
        probs: np.ndarray,
        edge: EdgeGeometry,
        belief: BeliefMap,
        ctx: RewardContext,
        end_cost: float,
    ) -> float:
        """Optimistic gain of flying ``edge``; updates ``probs`` in place."""
        footprint = edge_footprint(edge, self.camera, belief)
        if len(footprint) == 0:
            return 0.0
        post, gain = score_cells(probs[footprint.cells], footprint, ctx, ctx.time_at(end_cost))
        probs[footprint.cells] = post
        return gain

    def record(self, **fields: Any) -> CycleStats:
        stats = CycleStats(planner=self.name, cycle=len(self.stats), **fields)
        self.stats.append(stats)
        return stats


class PlannerError(Exception):
    """Base exception for planner errors."""

    def __init__(
        self,
        message: str,
        planner: str,
        error_code: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None,
    ) -> None:
        """Initialize planner error.

        Args:
            message: Error message
            planner: Planner name
            error_code: Optional error code
            details: Optional error details
        """
        super().__init__(message)
        self.message = message
        self.planner = planner
        self.error_code = error_code
        self.details = details or {}
