"""Greedy baseline: fly to the viewpoint with the best reward-to-distance ratio."""

import logging
import time
from typing import List, Optional, Tuple

import numpy as np

from ..belief.grid import BeliefMap
from ..belief.sensor import SensorModel
from ..geometry.footprint import CameraModel
from ..geometry.paths import dubins_path
from ..geometry.pose import Pose
from ..models.planning import Plan, PlanRequest
from ..planning.plan_tree import COST_TOLERANCE
from ..planning.rewards import optimistic_rewards
from .base import BasePlanner, Leg

logger = logging.getLogger(__name__)

MAX_CANDIDATES = 50


def viewpoints(
    state: Pose, tx: np.ndarray, ty: np.ndarray, cam: CameraModel, z: float
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Poses whose central ray hits each target, heading from ``state`` toward it.

    Returns:
        (x, y, yaw) arrays
    """
    yaw = np.arctan2(ty - state.y, tx - state.x)
    lead = cam.lead_distance(z)
    return tx - lead * np.cos(yaw), ty - lead * np.sin(yaw), yaw


def greedy_ratios(
    state: Pose,
    probs: np.ndarray,
    belief: BeliefMap,
    cam: CameraModel,
    model: SensorModel,
    z: float,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Reward over viewpoint distance for every cell.

    Returns:
        (ratio, viewpoint x, viewpoint y, viewpoint yaw)
    """
    ranges = np.full(belief.n_cells, cam.nominal_range(z))
    rewards, _ = optimistic_rewards(probs, ranges, model)
    rewards = belief.priority * rewards
    vx, vy, yaw = viewpoints(state, belief.center_x, belief.center_y, cam, z)
    distance = np.sqrt((vx - state.x) ** 2 + (vy - state.y) ** 2 + (z - state.z) ** 2)
    ratio = rewards / np.maximum(distance, belief.cell_size)
    return ratio, vx, vy, yaw


def greedy_plan_step(
    state: Pose,
    belief: BeliefMap,
    cam: CameraModel,
    model: SensorModel,
    z: Optional[float] = None,
) -> Pose:
    """Viewpoint of the cell with the highest reward-to-distance ratio.

    Returns ``state`` itself when no cell has positive reward.
    """
    z = state.z if z is None else z
    ratio, vx, vy, yaw = greedy_ratios(state, belief.prob, belief, cam, model, z)
    best = int(np.argmax(ratio))
    if ratio[best] <= 0.0:
        return state
    return Pose(float(vx[best]), float(vy[best]), z, float(yaw[best]))


class GreedyPlanner(BasePlanner):
    """Chains greedy steps, updating beliefs optimistically along each leg.

    Legs whose Dubins path leaves the bounds are skipped in favour of the
    next best candidate. The last leg is cut at the budget.
    """

    name = "greedy"
    adaptive = True

    def plan(self, request: PlanRequest) -> Plan:
        self.check_request(request)
        budget = self.budget_for(request)
        ctx = self.context(request)
        belief = request.belief
        z = self.config.altitudes[0]
        probs = belief.prob.copy()

        started = time.perf_counter()
        pose = request.start_pose
        cost = 0.0
        info = 0.0
        legs: List[Leg] = []
        while budget - cost > COST_TOLERANCE:
            ratio, vx, vy, yaw = greedy_ratios(pose, probs, belief, self.camera, self.sensor, z)
            order = np.argsort(-ratio, kind="stable")[:MAX_CANDIDATES]
            edge = None
            for cell in order:
                if ratio[cell] <= 0.0:
                    break
                target = Pose(float(vx[cell]), float(vy[cell]), z, float(yaw[cell]))
                path = dubins_path(pose, target, self.config.turn_radius)
                if path is None:
                    continue
                path = path.truncated(budget - cost)
                if path.inside(request.bounds, self.config.bounds_check_spacing):
                    edge = path
                    break
            if edge is None:
                break
            cost += edge.length
            info += self.leg_gain(probs, edge, belief, ctx, cost)
            legs.append((edge, info))
            pose = edge.end_pose

        plan = self.build_plan(request.start_pose, legs)
        self.record(
            iterations=len(legs),
            build_time=time.perf_counter() - started,
            plan_info=plan.total_info,
            plan_cost=plan.total_cost,
        )
        if not legs:
            logger.info("Greedy found no informative viewpoint")
        return plan
