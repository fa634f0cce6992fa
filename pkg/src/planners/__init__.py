"""Informative tree planner and the baselines it is compared against."""

from .base import BasePlanner, PlannerError
from .coverage import (
    CoveragePlanner,
    coverage_legs,
    coverage_passes,
    coverage_rows,
    row_order,
    row_spacing,
)
from .greedy import GreedyPlanner, greedy_plan_step
from .informative_tree import InformativeTreePlanner
from .mcts import MctsNode, MctsPlanner, MotionPrimitiveSet, ucb_score
from .random_walk import RandomPlanner

__all__ = [
    "BasePlanner",
    "CoveragePlanner",
    "GreedyPlanner",
    "InformativeTreePlanner",
    "MctsNode",
    "MctsPlanner",
    "MotionPrimitiveSet",
    "PlannerError",
    "RandomPlanner",
    "coverage_legs",
    "coverage_passes",
    "coverage_rows",
    "greedy_plan_step",
    "row_order",
    "row_spacing",
    "ucb_score",
]
