"""Fixed-wing mission simulation with in-flight replanning."""

import logging
import math
import time
from concurrent.futures import Future, ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from ..belief.grid import BeliefMap
from ..belief.sensor import SensorModel, entropy_array, posterior
from ..geometry.footprint import CameraModel, project_footprint
from ..geometry.pose import Pose, wrap_angle
from ..models.mission import MissionReport, SimConfig, TraceRow
from ..models.planning import Plan, PlanRequest, PoseModel, Waypoint
from ..planners.base import BasePlanner
from ..planning.rewards import trajectory_information
from .environment import Environment

logger = logging.getLogger(__name__)

MERGE_POSITION_TOL = 1.0
MERGE_HEADING_TOL = math.radians(5.0)


@dataclass
class VehicleState:
    pose: Pose
    speed: float
    distance_flown: float = 0.0
    waypoint: int = 0

    def __post_init__(self) -> None:
        if self.speed <= 0.0:
            raise ValueError("speed must be positive")


@dataclass
class MissionState:
    truth: np.ndarray
    belief: BeliefMap
    vehicle: VehicleState
    budget: float
    plan: Optional[Plan] = None
    plan_origin: float = 0.0
    t: float = 0.0
    entropy: float = 0.0
    initial_entropy: float = 0.0
    observed: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))
    trace: List[TraceRow] = field(default_factory=list)
    complete: bool = False

    @property
    def remaining_budget(self) -> float:
        return max(0.0, self.budget - self.vehicle.distance_flown)

    @property
    def progress(self) -> float:
        """Distance flown along the active plan."""
        return self.vehicle.distance_flown - self.plan_origin

    def record(self) -> TraceRow:
        pose = self.vehicle.pose
        reduction = (
            100.0 * (self.initial_entropy - self.entropy) / self.initial_entropy
            if self.initial_entropy > 0.0
            else 0.0
        )
        row = TraceRow(
            t=self.t,
            entropy_bits=self.entropy,
            pct_reduction=reduction,
            x=pose.x,
            y=pose.y,
            z=pose.z,
            psi=pose.psi,
        )
        self.trace.append(row)
        return row


def step(state: MissionState, config: SimConfig, dt: float) -> MissionState:
    """Advance the vehicle one tick toward the current waypoint.

    Heading and altitude follow proportional control; the turn rate is
    clamped to speed / turn radius and travel stops at the budget.
    """
    vehicle = state.vehicle
    plan = state.plan
    if plan is None or vehicle.waypoint >= len(plan.waypoints) or state.remaining_budget <= 0.0:
        state.complete = True
        return state

    pose = vehicle.pose
    target = plan.waypoints[vehicle.waypoint]
    dx, dy = target.x - pose.x, target.y - pose.y
    passed = vehicle.waypoint > 0 and (
        dx * math.cos(target.psi) + dy * math.sin(target.psi) < 0.0
    )
    if math.hypot(dx, dy) <= config.acceptance_radius or passed:
        vehicle.waypoint += 1
        if vehicle.waypoint >= len(plan.waypoints):
            state.complete = True
            return state
        target = plan.waypoints[vehicle.waypoint]
        dx, dy = target.x - pose.x, target.y - pose.y

    error = wrap_angle(math.atan2(dy, dx) - pose.psi)
    max_rate = vehicle.speed / config.turn_radius
    rate = max(-max_rate, min(max_rate, config.heading_gain * error))
    climb = config.altitude_gain * (target.z - pose.z)
    climb = max(-config.max_climb_rate, min(config.max_climb_rate, climb))

    travel = min(vehicle.speed * dt, state.remaining_budget)
    moved = travel / vehicle.speed
    mid = pose.psi + 0.5 * rate * moved
    vehicle.pose = Pose(
        pose.x + travel * math.cos(mid),
        pose.y + travel * math.sin(mid),
        max(1.0, pose.z + climb * moved),
        pose.psi + rate * moved,
    )
    vehicle.distance_flown += travel
    return state


def is_banking(plan: Optional[Plan], waypoint: int, threshold: float) -> bool:
    """True when the active waypoint transition turns more than ``threshold``."""
    if plan is None or waypoint <= 0 or waypoint >= len(plan.waypoints):
        return False
    prev, nxt = plan.waypoints[waypoint - 1], plan.waypoints[waypoint]
    return abs(wrap_angle(nxt.psi - prev.psi)) > threshold


def observe(
    state: MissionState,
    cam: CameraModel,
    model: SensorModel,
    rng: np.random.Generator,
    banking_threshold: float = math.radians(15.0),
) -> MissionState:
    """Simulated detections over the current footprint folded into the belief."""
    if is_banking(state.plan, state.vehicle.waypoint, banking_threshold):
        return state
    pose = state.vehicle.pose
    if pose.z <= 0.0:
        return state
    footprint = project_footprint(pose, cam, state.belief)
    if len(footprint) == 0:
        return state
    cells = footprint.cells
    tpr, tnr = model.rates_array(footprint.ranges)
    draws = rng.random(cells.size)
    positive = np.where(state.truth[cells], draws < tpr, draws >= tnr)
    prior = state.belief.prob[cells]
    post = posterior(prior, positive, tpr, tnr)
    state.entropy += float(np.sum(entropy_array(post) - entropy_array(prior)))
    state.belief.apply(cells, post)
    if state.observed.size:
        state.observed[cells] = True
    return state


def find_merge_index(plan: Plan, merge_pose: Pose, search_from: int = 0) -> Optional[int]:
    for i in range(max(0, search_from), len(plan.waypoints)):
        if plan.waypoints[i].pose().matches(merge_pose, MERGE_POSITION_TOL, MERGE_HEADING_TOL):
            return i
    return None


def _shifted(waypoints: List[Waypoint], cost: float, info: float) -> List[Waypoint]:
    return [
        w.model_copy(update={"cost": w.cost + cost, "info": w.info + info}) for w in waypoints
    ]


def merge_plan(
    current: Plan,
    fresh: Plan,
    merge_pose: Pose,
    vehicle_pose: Optional[Pose] = None,
    search_from: int = 0,
) -> Plan:
    """Keep ``current`` up to ``merge_pose`` and continue with ``fresh``.

    Costs of the fresh part are re-chained onto the prefix. When the merge
    pose is not on ``current``, ``fresh`` takes over from its point nearest
    the vehicle with costs starting at 0.
    """
    index = find_merge_index(current, merge_pose, search_from)
    if index is None:
        here = vehicle_pose or merge_pose
        nearest = min(
            range(len(fresh.waypoints)),
            key=lambda i: (fresh.waypoints[i].pose().planar_distance(here), i),
        )
        base = fresh.waypoints[nearest]
        logger.warning(
            "Merge pose (%.1f, %.1f) not on the active plan, taking over at fresh waypoint %d",
            merge_pose.x,
            merge_pose.y,
            nearest,
        )
        return Plan(
            planner=fresh.planner,
            waypoints=_shifted(fresh.waypoints[nearest:], -base.cost, 0.0),
            total_info=fresh.total_info,
        )
    anchor = current.waypoints[index]
    waypoints = list(current.waypoints[:index]) + _shifted(fresh.waypoints, anchor.cost, anchor.info)
    return Plan(
        planner=fresh.planner,
        waypoints=waypoints,
        total_info=anchor.info + fresh.total_info,
    )


@dataclass
class _Pending:
    anchor: Waypoint
    deliver_at: float
    plan: Optional[Plan] = None
    future: Optional[Future] = None


class MissionSimulator:
    """Runs one mission: tracking, observing and merging replans.

    On the simulated clock a request is planned when issued and handed over
    ``planning_time`` simulated seconds later. On the wall clock the planner
    runs on a worker thread while ticks are paced by the time multiplier.
    """

    def __init__(
        self,
        env: Environment,
        planner: BasePlanner,
        config: Optional[SimConfig] = None,
        seed: int = 0,
        budget: Optional[float] = None,
    ) -> None:
        self.env = env
        self.planner = planner
        self.config = config or SimConfig()
        self.seed = seed
        self.budget = planner.config.budget if budget is None else budget
        self.camera = planner.camera
        self.sensor = planner.sensor
        self.replans = 0
        self.replan_failures = 0
        self.off_plan_merges = 0
        truth_seq, measure_seq = np.random.SeedSequence(
            [env.spec.seed or 0, seed]
        ).spawn(2)
        self.truth_rng = np.random.default_rng(truth_seq)
        self.rng = np.random.default_rng(measure_seq)
        self._executor: Optional[ThreadPoolExecutor] = None

    def start_pose(self) -> Pose:
        if self.config.start is not None:
            return self.config.start.to_pose()
        b = self.env.bounds
        inset = min(self.config.turn_radius, 0.25 * b.height)
        return Pose(b.center[0], b.y_min + inset, self.planner.config.altitudes[0], math.pi / 2)

    def initial_state(self) -> MissionState:
        belief = self.env.belief.snapshot()
        entropy = belief.total_entropy()
        return MissionState(
            truth=self.env.truth(self.truth_rng),
            belief=belief,
            vehicle=VehicleState(self.start_pose(), self.config.speed),
            budget=self.budget,
            entropy=entropy,
            initial_entropy=entropy,
            observed=np.zeros(belief.n_cells, dtype=bool),
        )

    @property
    def lookahead_time(self) -> float:
        """Simulated seconds a request has before its plan is needed."""
        planning_time = self.planner.config.planning_time
        if self.config.deterministic:
            return planning_time
        return planning_time * self.config.time_multiplier

    def _request(self, state: MissionState, start: Pose, budget: float, t_start: float) -> PlanRequest:
        if self.config.horizon is not None:
            budget = min(budget, self.config.horizon)
        return PlanRequest(
            start=PoseModel.from_pose(start),
            budget=budget,
            bounds=self.env.bounds,
            belief=state.belief.snapshot(),
            time_offset=max(0.0, t_start),
        )

    def _plan(self, request: PlanRequest) -> Optional[Plan]:
        try:
            return self.planner.plan(request)
        except Exception as exc:  # noqa: BLE001
            self.replan_failures += 1
            logger.warning("Planner %s failed: %s", self.planner.name, exc)
            return None

    def _anchor(self, state: MissionState) -> Optional[Waypoint]:
        plan = state.plan
        if plan is None:
            return None
        ahead = state.progress + self.config.speed * self.lookahead_time
        for i in range(state.vehicle.waypoint, len(plan.waypoints)):
            w = plan.waypoints[i]
            if w.node and w.cost >= ahead:
                return w
        return None

    def _issue(self, state: MissionState) -> Optional[_Pending]:
        anchor = self._anchor(state)
        if anchor is None:
            return None
        remaining = self.budget - state.plan_origin - anchor.cost
        if remaining <= 1e-6:
            return None
        eta = state.t + (anchor.cost - state.progress) / self.config.speed
        request = self._request(state, anchor.pose(), remaining, eta)
        pending = _Pending(anchor=anchor, deliver_at=state.t + self.lookahead_time)
        if self.config.deterministic:
            pending.plan = self._plan(request)
        else:
            assert self._executor is not None
            pending.future = self._executor.submit(self.planner.plan, request)
        return pending

    def _install(self, state: MissionState, plan: Plan) -> None:
        state.plan = plan
        state.plan_origin = state.vehicle.distance_flown
        state.vehicle.waypoint = 0

    def _merge(self, state: MissionState, pending: _Pending, fresh: Plan) -> None:
        assert state.plan is not None
        anchor_pose = pending.anchor.pose()
        index = find_merge_index(state.plan, anchor_pose, state.vehicle.waypoint)
        merged = merge_plan(
            state.plan, fresh, anchor_pose, state.vehicle.pose, state.vehicle.waypoint
        )
        if index is None:
            self.off_plan_merges += 1
            self._install(state, merged)
        else:
            state.plan = merged
        self.replans += 1
        logger.debug("Merged replan %d at t=%.1f", self.replans, state.t)

    def _collect(self, state: MissionState, pending: _Pending) -> Optional[bool]:
        """Merge a finished request; None while it is still running."""
        if self.config.deterministic:
            if state.t + 1e-9 < pending.deliver_at:
                return None
            fresh = pending.plan
        else:
            assert pending.future is not None
            if not pending.future.done():
                return None
            try:
                fresh = pending.future.result()
            except Exception as exc:  # noqa: BLE001
                self.replan_failures += 1
                logger.warning("Planner %s failed: %s", self.planner.name, exc)
                fresh = None
        if fresh is not None:
            self._merge(state, pending, fresh)
        return fresh is not None

    def _settle(self, pending: Optional[_Pending]) -> None:
        """Drop a request, waiting out a worker that already started it.

        The planner instance is not thread safe; nothing else may call it
        until the worker has returned.
        """
        if pending is None or pending.future is None:
            return
        if pending.future.cancel():
            return
        try:
            pending.future.result()
        except Exception as exc:  # noqa: BLE001
            self.replan_failures += 1
            logger.warning("Planner %s failed: %s", self.planner.name, exc)
        logger.debug("Dropped in-flight replan for anchor at cost %.0f", pending.anchor.cost)

    def run(self) -> MissionReport:
        cfg = self.config
        state = self.initial_state()
        state.record()
        if self.budget <= 0.0:
            return self._report(state)

        first = self._plan(self._request(state, state.vehicle.pose, self.budget, 0.0))
        if first is None:
            return self._report(state)
        self._install(state, first)

        replanning = cfg.replan and self.planner.adaptive
        period = cfg.replan_period or self.planner.config.planning_time
        banking = math.radians(cfg.banking_threshold_deg)
        next_request = state.t
        pending: Optional[_Pending] = None
        if not cfg.deterministic:
            self._executor = ThreadPoolExecutor(max_workers=1, thread_name_prefix="planner")
        tick_wall = cfg.dt / cfg.time_multiplier
        try:
            while not state.complete:
                tick_started = time.perf_counter()
                if replanning:
                    if pending is not None and self._collect(state, pending) is not None:
                        pending = None
                    if pending is None and state.t + 1e-9 >= next_request:
                        pending = self._issue(state)
                        next_request = state.t + period

                step(state, cfg, cfg.dt)
                if state.complete and replanning and state.remaining_budget > 1e-6:
                    # plan ran out with budget left: replan from here at once
                    self._settle(pending)
                    pending = None
                    fresh = self._plan(
                        self._request(state, state.vehicle.pose, state.remaining_budget, state.t)
                    )
                    if fresh is not None and fresh.total_cost > 1e-6:
                        self._install(state, fresh)
                        self.replans += 1
                        state.complete = False
                        continue
                if state.complete:
                    break
                state.t += cfg.dt
                observe(state, self.camera, self.sensor, self.rng, banking)
                state.record()
                if not cfg.deterministic:
                    lag = tick_wall - (time.perf_counter() - tick_started)
                    if lag > 0.0:
                        time.sleep(lag)
        finally:
            if self._executor is not None:
                self._executor.shutdown(wait=True, cancel_futures=True)
                self._executor = None
        return self._report(state)

    def _report(self, state: MissionState) -> MissionReport:
        masks = self.env.cluster_masks() if self.env.spec.priors else []
        touched = sum(1 for m in masks if np.any(state.observed & m)) if masks else None
        last = state.trace[-1]
        report = MissionReport(
            planner=self.planner.name,
            seed=self.seed,
            budget=self.budget,
            initial_entropy=state.initial_entropy,
            final_entropy=state.entropy,
            final_reduction=last.pct_reduction,
            weighted_information=trajectory_information(
                self.env.belief.prob, state.belief.prob, state.belief.priority
            ),
            distance_flown=state.vehicle.distance_flown,
            duration=state.t,
            replans=self.replans,
            replan_failures=self.replan_failures,
            off_plan_merges=self.off_plan_merges,
            observed_cells=int(state.observed.sum()),
            clusters_touched=touched,
            trace=state.trace,
            cycles=list(self.planner.stats),
            final_belief=state.belief.to_document(),
        )
        logger.info(
            "Mission %s seed %d: %.2f%% reduction over %.0f m, %d replans",
            report.planner,
            report.seed,
            report.final_reduction,
            report.distance_flown,
            report.replans,
        )
        return report


def run_mission(
    env: Environment,
    planner: BasePlanner,
    config: Optional[SimConfig] = None,
    seed: int = 0,
    budget: Optional[float] = None,
) -> MissionReport:
    """Fly one mission from a reset planner and report the entropy trace."""
    planner.reset()
    return MissionSimulator(env, planner, config, seed, budget).run()


def executed_path(report: MissionReport) -> List[Tuple[float, float, float]]:
    return [(row.x, row.y, row.z) for row in report.trace]
