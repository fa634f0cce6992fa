"""Rewards, the planning tree and the informed sampler."""

from .plan_tree import (
    BudgetExceededError,
    PlanNode,
    PlanTree,
    TreeEdge,
    TreeError,
    replay_information,
)
from .rewards import (
    DecayFunction,
    RewardContext,
    decay_value,
    node_information,
    optimistic_cell_reward,
    weighted_cell_reward,
)
from .sampling import InformedSampler, informed_sample
from .spatial_index import SpatialHashIndex

__all__ = [
    "BudgetExceededError",
    "DecayFunction",
    "InformedSampler",
    "PlanNode",
    "PlanTree",
    "RewardContext",
    "SpatialHashIndex",
    "TreeEdge",
    "TreeError",
    "decay_value",
    "informed_sample",
    "node_information",
    "optimistic_cell_reward",
    "replay_information",
    "weighted_cell_reward",
]
