"""Mission simulator tests: tracking, observation, merging and missions."""

import logging
import math
import threading
import time

import numpy as np
import pytest

from src.belief.grid import BeliefMap
from src.belief.sensor import SensorModel
from src.geometry.pose import Pose
from src.models.mission import SimConfig
from src.models.planning import Plan, PlannerConfig, Waypoint
from src.planners import GreedyPlanner, InformativeTreePlanner, RandomPlanner
from src.services.simulator import (
    MissionSimulator,
    MissionState,
    VehicleState,
    executed_path,
    merge_plan,
    observe,
    run_mission,
    step,
)

pytestmark = pytest.mark.unit


def _straight_plan(x0=0.0, count=11, spacing=50.0, y=300.0, planner="tree"):
    waypoints = [
        Waypoint(x=x0 + k * spacing, y=y, z=50.0, psi=0.0, cost=k * spacing, info=0.1 * k, node=True)
        for k in range(count)
    ]
    return Plan(planner=planner, waypoints=waypoints, total_info=0.1 * (count - 1))


def _state(belief, pose, plan=None, budget=15000.0, truth=None):
    truth = np.zeros(belief.n_cells, dtype=bool) if truth is None else truth
    return MissionState(
        truth=truth,
        belief=belief,
        vehicle=VehicleState(pose, 25.0),
        budget=budget,
        plan=plan,
        entropy=belief.total_entropy(),
        initial_entropy=belief.total_entropy(),
        observed=np.zeros(belief.n_cells, dtype=bool),
    )


def _tree_planner(**update):
    config = PlannerConfig(
        extend_distance=200.0,
        near_radius=200.0,
        prune_radius=80.0,
        budget=600.0,
        planning_time=2.0,
        iterations=20,
    )
    return InformativeTreePlanner(config.model_copy(update=update))


# step


def test_step_flies_straight_at_speed(small_map):
    plan = _straight_plan(x0=100.0)
    state = _state(small_map, Pose(100.0, 300.0, 50.0, 0.0), plan)
    step(state, SimConfig(), 0.5)
    pose = state.vehicle.pose
    assert state.vehicle.waypoint == 1
    assert pose.x == pytest.approx(112.5)
    assert pose.y == pytest.approx(300.0)
    assert state.vehicle.distance_flown == pytest.approx(12.5)


def test_step_clamps_turn_rate(small_map):
    plan = Plan(
        planner="tree",
        waypoints=[
            Waypoint(x=300.0, y=300.0, z=50.0, psi=0.0, cost=0.0, info=0.0),
            Waypoint(x=300.0, y=500.0, z=50.0, psi=math.pi / 2, cost=200.0, info=0.0),
        ],
    )
    state = _state(small_map, Pose(300.0, 300.0, 50.0, 0.0), plan)
    step(state, SimConfig(), 0.5)
    assert state.vehicle.pose.psi == pytest.approx(0.125)


def test_step_switches_inside_acceptance_radius(small_map):
    plan = _straight_plan()
    state = _state(small_map, Pose(85.0, 300.0, 50.0, 0.0), plan)
    state.vehicle.waypoint = 2
    step(state, SimConfig(), 0.5)
    assert state.vehicle.waypoint == 3


def test_step_skips_passed_waypoint(small_map):
    plan = _straight_plan()
    state = _state(small_map, Pose(130.0, 330.0, 50.0, 0.0), plan)
    state.vehicle.waypoint = 2
    step(state, SimConfig(), 0.5)
    assert state.vehicle.waypoint == 3


def test_step_stops_at_budget(small_map):
    state = _state(small_map, Pose(0.0, 300.0, 50.0, 0.0), _straight_plan(), budget=5.0)
    step(state, SimConfig(), 0.5)
    assert state.vehicle.distance_flown == pytest.approx(5.0)
    step(state, SimConfig(), 0.5)
    assert state.complete
    assert state.vehicle.distance_flown == pytest.approx(5.0)


def test_step_without_plan_completes(small_map):
    state = _state(small_map, Pose(0.0, 300.0, 50.0, 0.0))
    assert step(state, SimConfig(), 0.5).complete


def test_vehicle_speed_must_be_positive():
    with pytest.raises(ValueError):
        VehicleState(Pose(0.0, 0.0, 50.0, 0.0), 0.0)


# observe


def test_observe_skipped_while_banking(small_map, camera, sensor, rng):
    plan = Plan(
        planner="tree",
        waypoints=[
            Waypoint(x=300.0, y=300.0, z=50.0, psi=0.0, cost=0.0, info=0.0),
            Waypoint(x=350.0, y=320.0, z=50.0, psi=math.radians(30.0), cost=55.0, info=0.0),
        ],
    )
    state = _state(small_map, Pose(300.0, 300.0, 50.0, 0.0), plan)
    state.vehicle.waypoint = 1
    before = small_map.prob.copy()
    observe(state, camera, sensor, rng)
    assert np.array_equal(state.belief.prob, before)
    assert not state.observed.any()


def test_coin_sensor_leaves_belief_unchanged(small_map, camera, rng):
    coin = SensorModel.constant(0.5, 0.5, 600.0)
    state = _state(small_map, Pose(300.0, 300.0, 50.0, 0.0))
    entropy = state.entropy
    observe(state, camera, coin, rng)
    assert state.belief.prob == pytest.approx(np.full(small_map.n_cells, 0.5))
    assert state.entropy == pytest.approx(entropy)
    assert state.observed.any()


def test_repeated_observation_converges_to_truth(camera, sensor, rng):
    belief = BeliefMap.uniform(600.0, 600.0, 15.0, 0.3)
    truth = np.zeros(belief.n_cells, dtype=bool)
    pose = Pose(300.0, 200.0, 50.0, math.pi / 2)
    target = belief.cell_at(300.0, 300.0)
    truth[target] = True
    state = _state(belief, pose, truth=truth)
    for _ in range(60):
        observe(state, camera, sensor, rng)
    seen = state.observed
    assert seen[target]
    assert belief.prob[target] > 0.99
    others = seen.copy()
    others[target] = False
    assert np.all(belief.prob[others] < 0.01)
    assert state.entropy < state.initial_entropy


# merge


def test_merge_keeps_prefix_and_rechains_costs():
    current = _straight_plan()
    anchor = current.waypoints[6]
    fresh = _straight_plan(x0=300.0, count=5, planner="tree")
    merged = merge_plan(current, fresh, anchor.pose())
    assert [w.x for w in merged.waypoints[:6]] == [w.x for w in current.waypoints[:6]]
    tail = merged.waypoints[6:]
    assert len(tail) == len(fresh.waypoints)
    assert tail[0].cost == pytest.approx(300.0)
    assert tail[-1].cost == pytest.approx(500.0)
    assert tail[-1].info == pytest.approx(0.6 + 0.4)
    assert merged.total_info == pytest.approx(anchor.info + fresh.total_info)


def test_merge_off_plan_takes_over_fresh(caplog):
    current = _straight_plan()
    fresh = _straight_plan(x0=0.0, count=5, y=500.0)
    vehicle = Pose(110.0, 480.0, 50.0, 0.0)
    with caplog.at_level(logging.WARNING, logger="src.services.simulator"):
        merged = merge_plan(current, fresh, Pose(999.0, 999.0, 50.0, 0.0), vehicle)
    assert "not on the active plan" in caplog.text
    assert merged.waypoints[0].x == pytest.approx(100.0)
    assert merged.waypoints[0].cost == 0.0
    assert len(merged.waypoints) == 3


# missions


def test_zero_budget_mission_reports_immediately(blob_env):
    report = run_mission(blob_env, GreedyPlanner(PlannerConfig()), SimConfig(dt=1.0), budget=0.0)
    assert report.distance_flown == 0.0
    assert report.replans == 0
    assert len(report.trace) == 1
    assert report.final_reduction == 0.0


def test_mission_stays_within_budget(blob_env):
    report = run_mission(blob_env, _tree_planner(), SimConfig(dt=1.0), seed=3)
    assert 0.0 < report.distance_flown <= 600.0 + 1e-6
    assert report.replans > 0
    assert report.cycles
    last = report.trace[-1]
    assert report.final_reduction == pytest.approx(last.pct_reduction)
    assert report.final_reduction == pytest.approx(
        100.0 * (report.initial_entropy - report.final_entropy) / report.initial_entropy
    )
    assert report.weighted_information == pytest.approx(
        report.initial_entropy - report.final_entropy
    )


def test_weighted_information_follows_priority(blob_env):
    blob_env.belief.priority[:] = 2.5
    report = run_mission(blob_env, _tree_planner(), SimConfig(dt=1.0), seed=3)
    assert report.weighted_information > 0.0
    assert report.weighted_information == pytest.approx(
        2.5 * (report.initial_entropy - report.final_entropy)
    )
    assert "weighted_information" in report.summary()


def test_replanning_can_be_disabled(blob_env):
    report = run_mission(blob_env, _tree_planner(), SimConfig(dt=1.0, replan=False))
    assert report.replans == 0
    assert len(report.cycles) == 1


def test_non_adaptive_planner_flies_one_plan(blob_env):
    report = run_mission(blob_env, RandomPlanner(PlannerConfig(budget=600.0)), SimConfig(dt=1.0))
    assert len(report.cycles) == 1


def test_planner_failure_is_counted_and_mission_continues(blob_env, mocker):
    planner = _tree_planner()
    real_plan = planner.plan
    calls = {"n": 0}

    def flaky(request):
        calls["n"] += 1
        if calls["n"] == 1:
            return real_plan(request)
        raise RuntimeError("planner crashed")

    mocker.patch.object(planner, "plan", side_effect=flaky)
    report = run_mission(blob_env, planner, SimConfig(dt=1.0))
    assert report.replan_failures >= 1
    assert report.distance_flown > 0.0
    assert report.replans == 0


def test_same_seed_same_trace(blob_env):
    first = run_mission(blob_env, _tree_planner(), SimConfig(dt=1.0), seed=7)
    second = run_mission(blob_env, _tree_planner(), SimConfig(dt=1.0), seed=7)
    assert [r.model_dump() for r in first.trace] == [r.model_dump() for r in second.trace]
    assert executed_path(first) == executed_path(second)


def test_start_pose_defaults_to_bottom_edge(blob_env):
    sim = MissionSimulator(blob_env, _tree_planner())
    pose = sim.start_pose()
    assert pose.x == pytest.approx(500.0)
    assert pose.y == pytest.approx(100.0)
    assert pose.psi == pytest.approx(math.pi / 2)


def test_horizon_caps_requests(blob_env, mocker):
    planner = _tree_planner()
    spy = mocker.spy(planner, "plan")
    run_mission(blob_env, planner, SimConfig(dt=1.0, horizon=250.0))
    assert spy.call_count >= 1
    assert all(call.args[0].budget <= 250.0 for call in spy.call_args_list)


@pytest.mark.integration
def test_wall_clock_mission_uses_worker_thread(blob_env):
    config = SimConfig(dt=1.0, deterministic=False, time_multiplier=200.0)
    report = run_mission(blob_env, _tree_planner(planning_time=0.5), config, seed=1)
    assert 0.0 < report.distance_flown <= 600.0 + 1e-6
    assert report.replan_failures == 0


@pytest.mark.integration
def test_plan_running_out_waits_for_in_flight_replan(blob_env, mocker):
    planner = _tree_planner(planning_time=0.1)
    real_plan = planner.plan
    lock = threading.Lock()
    calls = {"active": 0, "peak": 0}

    def slow_plan(request):
        with lock:
            calls["active"] += 1
            calls["peak"] = max(calls["peak"], calls["active"])
        try:
            time.sleep(1.0)
            return real_plan(request)
        finally:
            with lock:
                calls["active"] -= 1

    mocker.patch.object(planner, "plan", side_effect=slow_plan)
    config = SimConfig(dt=1.0, deterministic=False, time_multiplier=20.0, horizon=200.0)
    report = run_mission(blob_env, planner, config, seed=2)
    assert calls["peak"] == 1
    assert report.replans >= 1
    assert 0.0 < report.distance_flown <= 600.0 + 1e-6
