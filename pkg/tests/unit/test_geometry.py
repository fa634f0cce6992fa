"""Pose, Dubins path and steering tests."""

import math

import numpy as np
import pytest

from src.geometry.bounds import Bounds
from src.geometry.paths import (
    arc,
    dubins_path,
    dubins_path_inside,
    dubins_words,
    steer,
    word_geometry,
)
from src.geometry.pose import GeometryError, Pose, wrap_angle

pytestmark = pytest.mark.unit

R_MIN = 100.0
BIG = Bounds(x_min=-5000.0, y_min=-5000.0, x_max=5000.0, y_max=5000.0)


def _close(a: Pose, b: Pose, tol: float = 1e-6) -> bool:
    return a.distance(b) <= tol and a.heading_error(b) <= tol


def test_wrap_angle_range():
    assert wrap_angle(3 * math.pi) == pytest.approx(math.pi)
    assert wrap_angle(-math.pi) == pytest.approx(math.pi)
    assert wrap_angle(0.5) == pytest.approx(0.5)
    assert Pose(0.0, 0.0, 10.0, 2 * math.pi + 0.1).psi == pytest.approx(0.1)


def test_pose_below_ground_rejected():
    with pytest.raises(GeometryError):
        Pose(0.0, 0.0, -1.0)


def test_pose_matches_tolerances():
    a = Pose(0.0, 0.0, 50.0, 0.0)
    assert a.matches(Pose(0.5, 0.0, 50.0, math.radians(3.0)))
    assert not a.matches(Pose(2.0, 0.0, 50.0, 0.0))
    assert not a.matches(Pose(0.0, 0.0, 50.0, math.radians(10.0)))


def test_straight_ahead_is_a_straight_line():
    path = dubins_path(Pose(0.0, 0.0, 50.0, 0.0), Pose(500.0, 0.0, 50.0, 0.0), R_MIN)
    assert path is not None
    assert path.length == pytest.approx(500.0)
    assert path.max_curvature == 0.0


def test_half_turn_is_a_half_circle():
    path = dubins_path(Pose(0.0, 0.0, 50.0, 0.0), Pose(0.0, 200.0, 50.0, math.pi), R_MIN)
    assert path is not None
    assert path.length == pytest.approx(math.pi * R_MIN)


def test_coincident_poses_have_no_path():
    pose = Pose(10.0, 10.0, 50.0, 0.3)
    assert dubins_path(pose, pose, R_MIN) is None


def test_dubins_paths_reach_goal_with_shortest_word():
    """Every word ends at the goal and the chosen path is the shortest word."""
    rng = np.random.default_rng(7)
    for _ in range(200):
        start = Pose(*rng.uniform(-800, 800, 2), 50.0, rng.uniform(-math.pi, math.pi))
        goal = Pose(*rng.uniform(-800, 800, 2), 80.0, rng.uniform(-math.pi, math.pi))
        words = dubins_words(start, goal, R_MIN)
        assert words
        for word, params in words.items():
            geometry = word_geometry(start, goal.z, word, params, R_MIN)
            end = geometry.end_pose
            assert end.planar_distance(goal) < 1e-6
            assert abs(wrap_angle(end.psi - goal.psi)) < 1e-6
        path = dubins_path(start, goal, R_MIN)
        assert path is not None
        shortest = min(sum(p) for p in words.values()) * R_MIN
        assert path.length == pytest.approx(shortest, abs=1e-6)
        assert path.max_curvature <= 1.0 / R_MIN + 1e-12
        assert path.end_pose.z == pytest.approx(80.0)


def test_left_target_needs_longer_than_straight_line():
    start = Pose(0.0, 0.0, 50.0, 0.0)
    goal = Pose(0.0, 50.0, 50.0, math.pi / 2)
    path = dubins_path(start, goal, R_MIN)
    assert path is not None
    assert path.length > 50.0
    assert _close(path.end_pose, goal)


def test_dubins_path_inside_respects_bounds():
    start = Pose(400.0, 100.0, 50.0, 0.0)
    goal = Pose(400.0, 320.0, 50.0, math.pi)
    roomy = Bounds(x_min=0.0, y_min=0.0, x_max=520.0, y_max=600.0)
    path = dubins_path_inside(start, goal, R_MIN, roomy)
    assert path is not None
    assert path.length == pytest.approx(math.pi * R_MIN + 20.0)
    assert path.end_pose.planar_distance(goal) < 1e-6
    assert path.inside(roomy)
    # heading east 50 m from the wall leaves no room to turn
    tight = Bounds(x_min=0.0, y_min=0.0, x_max=450.0, y_max=600.0)
    assert dubins_path_inside(start, goal, R_MIN, tight) is None


def test_dubins_path_inside_never_beats_free_path():
    rng = np.random.default_rng(11)
    bounds = Bounds(x_min=0.0, y_min=0.0, x_max=800.0, y_max=800.0)
    for _ in range(100):
        start = Pose(*rng.uniform(100, 700, 2), 50.0, rng.uniform(-math.pi, math.pi))
        goal = Pose(*rng.uniform(100, 700, 2), 50.0, rng.uniform(-math.pi, math.pi))
        path = dubins_path_inside(start, goal, R_MIN, bounds)
        if path is None:
            continue
        assert path.inside(bounds)
        assert path.end_pose.planar_distance(goal) < 1e-6
        assert path.length >= dubins_path(start, goal, R_MIN).length - 1e-9


def test_arc_geometry():
    edge = arc(Pose(0.0, 0.0, 50.0, 0.0), 1.0 / R_MIN, math.pi * R_MIN / 2)
    end = edge.end_pose
    assert end.x == pytest.approx(R_MIN)
    assert end.y == pytest.approx(R_MIN)
    assert end.psi == pytest.approx(math.pi / 2)


def test_truncated_prefix():
    edge = arc(Pose(0.0, 0.0, 50.0, 0.0), 0.0, 400.0, z_end=90.0)
    cut = edge.truncated(100.0)
    assert cut.length == pytest.approx(100.0)
    assert cut.end_pose.x == pytest.approx(100.0)
    assert cut.end_pose.z == pytest.approx(60.0)
    assert edge.truncated(1000.0) is edge


def test_steer_short_target_is_reached():
    start = Pose(0.0, 0.0, 50.0, 0.0)
    steered = steer(start, Pose(750.0, 0.0, 50.0, 0.0), 1500.0, BIG, R_MIN)
    assert steered is not None
    pose, edge = steered
    assert edge.length == pytest.approx(750.0)
    assert pose.x == pytest.approx(750.0)
    assert pose.y == pytest.approx(0.0, abs=1e-9)


def test_steer_far_target_is_truncated():
    start = Pose(0.0, 0.0, 50.0, 0.0)
    steered = steer(start, Pose(4500.0, 0.0, 50.0, 0.0), 1500.0, BIG, R_MIN)
    assert steered is not None
    pose, edge = steered
    assert edge.length == pytest.approx(1500.0)
    assert pose.x == pytest.approx(1500.0)


def test_steer_rejects_paths_leaving_bounds():
    bounds = Bounds.from_size(1000.0, 1000.0)
    start = Pose(500.0, 950.0, 50.0, math.pi / 2)
    # any path back south must first loop north past the boundary
    assert steer(start, Pose(500.0, 500.0, 50.0, -math.pi / 2), 1500.0, bounds, R_MIN) is None


def test_bounds_contains():
    bounds = Bounds.from_size(100.0, 50.0, origin=(10.0, 20.0))
    assert bounds.contains(10.0, 20.0)
    assert bounds.contains(110.0, 70.0)
    assert not bounds.contains(111.0, 30.0)
    assert bounds.center == (60.0, 45.0)
    with pytest.raises(ValueError):
        Bounds(x_min=0.0, y_min=0.0, x_max=0.0, y_max=1.0)
