"""Random baseline: chain minimum-cost paths to viewpoints of uniform points."""

import logging
import time
from typing import List, Optional

import numpy as np

from ..geometry.paths import EdgeGeometry, dubins_path
from ..geometry.pose import Pose
from ..models.planning import Plan, PlanRequest
from ..planning.plan_tree import COST_TOLERANCE
from .base import BasePlanner, Leg
from .greedy import viewpoints

logger = logging.getLogger(__name__)

MAX_ATTEMPTS = 100


class RandomPlanner(BasePlanner):
    name = "random"
    adaptive = False

    def _leg(self, pose: Pose, request: PlanRequest, remaining: float) -> Optional[EdgeGeometry]:
        """Path to the viewpoint of a uniformly drawn point, retried until in bounds."""
        b = request.bounds
        altitudes = self.config.altitudes
        for _ in range(MAX_ATTEMPTS):
            tx = self.rng.uniform(b.x_min, b.x_max)
            ty = self.rng.uniform(b.y_min, b.y_max)
            z = altitudes[int(self.rng.integers(len(altitudes)))]
            vx, vy, yaw = viewpoints(pose, np.array([tx]), np.array([ty]), self.camera, z)
            target = Pose(float(vx[0]), float(vy[0]), z, float(yaw[0]))
            if not b.contains(target.x, target.y):
                continue
            path = dubins_path(pose, target, self.config.turn_radius)
            if path is None:
                continue
            path = path.truncated(remaining)
            if path.inside(b, self.config.bounds_check_spacing):
                return path
        return None

    def plan(self, request: PlanRequest) -> Plan:
        self.check_request(request)
        budget = self.budget_for(request)
        ctx = self.context(request)
        probs = request.belief.prob.copy()

        started = time.perf_counter()
        pose = request.start_pose
        cost = 0.0
        info = 0.0
        legs: List[Leg] = []
        while budget - cost > COST_TOLERANCE:
            edge = self._leg(pose, request, budget - cost)
            if edge is None:
                logger.warning("No reachable random viewpoint after %d draws", MAX_ATTEMPTS)
                break
            cost += edge.length
            info += self.leg_gain(probs, edge, request.belief, ctx, cost)
            legs.append((edge, info))
            pose = edge.end_pose

        plan = self.build_plan(request.start_pose, legs)
        self.record(
            iterations=len(legs),
            build_time=time.perf_counter() - started,
            plan_info=plan.total_info,
            plan_cost=plan.total_cost,
        )
        return plan
