"""Monte Carlo tree search over motion primitives with a UCB selection rule."""

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from ..geometry.footprint import edge_footprint, project_footprint
from ..geometry.paths import EdgeGeometry, arc
from ..geometry.pose import Pose
from ..models.planning import Plan, PlannerConfig, PlanRequest
from ..planning.plan_tree import COST_TOLERANCE
from ..planning.rewards import RewardContext, node_information
from .base import BasePlanner, Leg

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MotionPrimitiveSet:
    """Constant-curvature arcs flown at fixed altitude."""

    primitives: Tuple[Tuple[float, float], ...]
    max_curvature: float

    def __post_init__(self) -> None:
        if not self.primitives:
            raise ValueError("primitive set must not be empty")
        for curvature, length in self.primitives:
            if abs(curvature) > self.max_curvature + 1e-12:
                raise ValueError(f"curvature {curvature} exceeds {self.max_curvature}")
            if length <= 0.0:
                raise ValueError("primitive lengths must be positive")

    @classmethod
    def arcs(cls, r_min: float, count: int = 7, length: float = 250.0) -> "MotionPrimitiveSet":
        """``count`` arcs with curvatures evenly spread over [-1/r_min, 1/r_min]."""
        k_max = 1.0 / r_min
        if count == 1:
            curvatures = [0.0]
        else:
            curvatures = np.linspace(-k_max, k_max, count).tolist()
        return cls(tuple((float(k), float(length)) for k in curvatures), k_max)

    def __len__(self) -> int:
        return len(self.primitives)

    def edge(self, start: Pose, index: int) -> EdgeGeometry:
        curvature, length = self.primitives[index]
        return arc(start, curvature, length)


@dataclass
class MctsNode:
    id: int
    pose: Pose
    cost: float
    info: float
    delta: Dict[int, float]
    parent: Optional["MctsNode"] = None
    primitive: Optional[int] = None
    geometry: Optional[EdgeGeometry] = None
    visits: int = 0
    value_sum: float = 0.0
    children: Dict[int, "MctsNode"] = field(default_factory=dict)
    untried: Optional[List[int]] = None

    @property
    def value(self) -> float:
        """Mean backed-up return."""
        return self.value_sum / self.visits if self.visits else 0.0

    def chain(self) -> Iterator[Dict[int, float]]:
        node: Optional[MctsNode] = self
        while node is not None:
            yield node.delta
            node = node.parent


def ucb_score(node: MctsNode, n_tree: int, exploration: float, alpha: float) -> float:
    """Normalized mean information plus the visit-count bonus.

    Raises:
        ValueError: For unvisited nodes, an empty tree or non-positive ``alpha``
    """
    if node.visits < 1 or n_tree < 1:
        raise ValueError("ucb_score needs visited nodes")
    if alpha <= 0.0:
        raise ValueError("alpha must be positive")
    return node.value / alpha + exploration * math.sqrt(math.log(n_tree) / node.visits)


class MctsPlanner(BasePlanner):
    """UCT search: select, expand one primitive, random rollout, mean backup."""

    name = "mcts"
    adaptive = True

    def __init__(self, config: Optional[PlannerConfig] = None) -> None:
        super().__init__(config)
        mcts = self.config.mcts
        self.primitives = MotionPrimitiveSet.arcs(
            self.config.turn_radius, mcts.primitive_count, mcts.primitive_length
        )
        self.root: Optional[MctsNode] = None
        self._next_id = 0

    def _feasible(self, node: MctsNode, request: PlanRequest, budget: float) -> List[int]:
        result = []
        for index in range(len(self.primitives)):
            _, length = self.primitives.primitives[index]
            if node.cost + length > budget + COST_TOLERANCE:
                continue
            edge = self.primitives.edge(node.pose, index)
            if edge.inside(request.bounds, self.config.bounds_check_spacing):
                result.append(index)
        return result

    def _child(
        self, node: MctsNode, index: int, request: PlanRequest, ctx: RewardContext
    ) -> MctsNode:
        edge = self.primitives.edge(node.pose, index)
        cost = node.cost + edge.length
        footprint = edge_footprint(edge, self.camera, request.belief)
        delta, gain = node_information(node.chain(), footprint, ctx, ctx.time_at(cost))
        child = MctsNode(
            id=self._next_id,
            pose=edge.end_pose,
            cost=cost,
            info=node.info + gain,
            delta=delta,
            parent=node,
            primitive=index,
            geometry=edge,
        )
        self._next_id += 1
        node.children[index] = child
        return child

    def _rollout(
        self, node: MctsNode, request: PlanRequest, ctx: RewardContext, budget: float
    ) -> float:
        """Random primitives from ``node`` until none fits; returns the path info."""
        chain: List[Dict[int, float]] = []
        pose, cost, info = node.pose, node.cost, node.info
        while True:
            options = []
            for index in range(len(self.primitives)):
                _, length = self.primitives.primitives[index]
                if cost + length > budget + COST_TOLERANCE:
                    continue
                edge = self.primitives.edge(pose, index)
                if edge.inside(request.bounds, self.config.bounds_check_spacing):
                    options.append(edge)
            if not options:
                return info
            edge = options[int(self.rng.integers(len(options)))]
            cost += edge.length
            footprint = edge_footprint(edge, self.camera, request.belief)
            delta, gain = node_information(
                [*reversed(chain), *node.chain()], footprint, ctx, ctx.time_at(cost)
            )
            chain.append(delta)
            info += gain
            pose = edge.end_pose

    def _select(self, alpha: float) -> MctsNode:
        assert self.root is not None
        node = self.root
        exploration = self.config.mcts.exploration
        while node.untried == [] and node.children:
            n_tree = self.root.visits
            node = max(
                node.children.values(),
                key=lambda c: (ucb_score(c, n_tree, exploration, alpha), -c.id),
            )
        return node

    def iterate(self, request: PlanRequest, ctx: RewardContext, budget: float, alpha: float) -> None:
        """One select/expand/rollout/backup pass."""
        node = self._select(alpha)
        if node.untried is None:
            node.untried = self._feasible(node, request, budget)
        if node.untried:
            index = node.untried.pop(int(self.rng.integers(len(node.untried))))
            node = self._child(node, index, request, ctx)
        value = self._rollout(node, request, ctx, budget)
        current: Optional[MctsNode] = node
        while current is not None:
            current.visits += 1
            current.value_sum += value
            current = current.parent

    def nodes(self) -> Iterator[MctsNode]:
        if self.root is None:
            return
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(node.children.values())

    def plan(self, request: PlanRequest) -> Plan:
        self.check_request(request)
        cfg = self.config
        budget = self.budget_for(request)
        ctx = self.context(request)
        alpha = budget / cfg.speed

        start = request.start_pose
        footprint = project_footprint(start, self.camera, request.belief)
        delta, gain = node_information((), footprint, ctx, ctx.time_at(0.0))
        self._next_id = 1
        self.root = MctsNode(id=0, pose=start, cost=0.0, info=gain, delta=delta)

        iterations = cfg.mcts.iterations if cfg.mcts.iterations is not None else cfg.iterations
        started = time.perf_counter()
        count = 0
        while True:
            if iterations is not None:
                if count >= iterations:
                    break
            elif time.perf_counter() - started >= cfg.planning_time:
                break
            self.iterate(request, ctx, budget, alpha)
            count += 1
        build_time = time.perf_counter() - started

        best = min(self.nodes(), key=lambda n: (-n.info, n.cost, n.id))
        legs: List[Leg] = []
        current: Optional[MctsNode] = best
        while current is not None and current.geometry is not None:
            legs.append((current.geometry, current.info))
            current = current.parent
        legs.reverse()
        plan = self.build_plan(start, legs, self.root.info)
        size = sum(1 for _ in self.nodes())
        self.record(
            iterations=count,
            tree_size=size,
            build_time=build_time,
            plan_info=plan.total_info,
            plan_cost=plan.total_cost,
        )
        logger.info(
            "MCTS cycle %d: %d nodes, %d iterations, info %.3f",
            len(self.stats) - 1,
            size,
            count,
            plan.total_info,
        )
        return plan
