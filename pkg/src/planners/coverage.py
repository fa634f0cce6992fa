"""Lawnmower coverage baseline."""

import logging
import math
import time
from typing import List, Optional, Tuple

from ..geometry.bounds import Bounds
from ..geometry.footprint import CameraModel
from ..geometry.paths import EdgeGeometry, arc, dubins_path_inside
from ..geometry.pose import GeometryError, Pose
from ..models.planning import Plan, PlanRequest
from ..planning.plan_tree import COST_TOLERANCE
from .base import BasePlanner, Leg

logger = logging.getLogger(__name__)


def row_spacing(cam: CameraModel, z: float, fraction: float = 0.2) -> float:
    """Footprint width measured ``fraction`` of the way up from its near edge."""
    spacing = cam.width_at_fraction(z, fraction)
    if spacing <= 0.0:
        raise GeometryError(f"camera sees no ground from z={z}")
    return spacing


def coverage_rows(
    bounds: Bounds, cam: CameraModel, z: float, fraction: float = 0.2
) -> List[float]:
    """Row y coordinates, one footprint width apart, bottom to top."""
    spacing = row_spacing(cam, z, fraction)
    count = max(1, int(math.ceil(bounds.height / spacing - 1e-9)))
    if count == 1:
        return [bounds.y_min + 0.5 * bounds.height]
    return [
        min(bounds.y_min + spacing * (k + 0.5), bounds.y_max - 0.5 * spacing)
        for k in range(count)
    ]


def row_order(count: int, gap: int) -> List[int]:
    """Row visiting order with consecutive rows at least ``gap`` apart.

    Takes the nearest unvisited row that is far enough; when none is left,
    the farthest one.
    """
    if count <= 0:
        return []
    order = [0]
    left = set(range(1, count))
    while left:
        current = order[-1]
        far = [j for j in left if abs(j - current) >= gap]
        if far:
            nxt = min(far, key=lambda j: (abs(j - current), j))
        else:
            nxt = max(left, key=lambda j: (abs(j - current), -j))
        order.append(nxt)
        left.remove(nxt)
    return order


def coverage_passes(
    bounds: Bounds,
    cam: CameraModel,
    z: float,
    r_min: float,
    fraction: float = 0.2,
    east_first: bool = True,
) -> List[Tuple[Pose, Pose]]:
    """Straight passes as (entry, exit) poses in flying order.

    Every row is flown once each way, so the camera, which leads the
    vehicle, reaches both side edges. Passes stop ``r_min`` short of the
    sides so U-turns stay inside; rows are ordered so consecutive passes are
    two turn radii apart.
    """
    ys = coverage_rows(bounds, cam, z, fraction)
    spacing = row_spacing(cam, z, fraction)
    gap = max(1, int(math.ceil(2.0 * r_min / spacing - 1e-9)))
    order = row_order(len(ys), gap)

    x_lo, x_hi = bounds.x_min + r_min, bounds.x_max - r_min
    if x_hi < x_lo:
        x_lo = x_hi = bounds.center[0]

    passes = []
    for sweep in range(2):
        for k, row in enumerate(order):
            east = (k % 2 == 0) == east_first
            if sweep == 1:
                east = not east
            y = ys[row]
            if east:
                passes.append((Pose(x_lo, y, z, 0.0), Pose(x_hi, y, z, 0.0)))
            else:
                passes.append((Pose(x_hi, y, z, math.pi), Pose(x_lo, y, z, math.pi)))
    return passes


def _connect(
    pose: Pose, target: Pose, bounds: Bounds, r_min: float, check_spacing: float
) -> Tuple[bool, Optional[EdgeGeometry]]:
    """(reachable, path); a target already reached needs no path."""
    if pose.matches(target, 1e-6, 1e-9):
        return True, None
    path = dubins_path_inside(pose, target, r_min, bounds, check_spacing)
    return path is not None, path


def coverage_legs(
    start: Pose,
    bounds: Bounds,
    cam: CameraModel,
    z: float,
    r_min: float,
    fraction: float = 0.2,
    check_spacing: float = 1.0,
) -> List[EdgeGeometry]:
    """Untruncated lawnmower path from ``start`` that never leaves ``bounds``.

    The first pass heads whichever way has the shorter in-bounds turn-in.
    A pass with no in-bounds connection from the previous one is skipped.
    """
    best: Optional[List[Tuple[Pose, Pose]]] = None
    best_length = math.inf
    for east_first in (True, False):
        passes = coverage_passes(bounds, cam, z, r_min, fraction, east_first)
        ok, path = _connect(start, passes[0][0], bounds, r_min, check_spacing)
        length = 0.0 if path is None else path.length
        if ok and length < best_length:
            best, best_length = passes, length
    if best is None:
        best = coverage_passes(bounds, cam, z, r_min, fraction)

    legs: List[EdgeGeometry] = []
    pose = start
    skipped = 0
    for entry, exit_ in best:
        ok, turn = _connect(pose, entry, bounds, r_min, check_spacing)
        if not ok:
            skipped += 1
            continue
        if turn is not None:
            legs.append(turn)
        length = entry.planar_distance(exit_)
        if length > 0.0:
            legs.append(arc(entry, 0.0, length))
        pose = exit_
    if skipped:
        logger.debug("Skipped %d of %d passes with no in-bounds turn", skipped, len(best))
    return legs


class CoveragePlanner(BasePlanner):
    name = "coverage"
    adaptive = False

    def plan(self, request: PlanRequest) -> Plan:
        self.check_request(request)
        budget = self.budget_for(request)
        ctx = self.context(request)
        probs = request.belief.prob.copy()
        z = self.config.altitudes[0]

        started = time.perf_counter()
        cost = 0.0
        info = 0.0
        legs: List[Leg] = []
        for edge in coverage_legs(
            request.start_pose,
            request.bounds,
            self.camera,
            z,
            self.config.turn_radius,
            self.config.coverage_fraction,
            self.config.bounds_check_spacing,
        ):
            remaining = budget - cost
            if remaining <= COST_TOLERANCE:
                break
            edge = edge.truncated(remaining)
            cost += edge.length
            info += self.leg_gain(probs, edge, request.belief, ctx, cost)
            legs.append((edge, info))

        plan = self.build_plan(request.start_pose, legs)
        self.record(
            iterations=len(legs),
            build_time=time.perf_counter() - started,
            plan_info=plan.total_info,
            plan_cost=plan.total_cost,
        )
        logger.info("Coverage plan: %d legs, %.1f m", len(legs), plan.total_cost)
        return plan
