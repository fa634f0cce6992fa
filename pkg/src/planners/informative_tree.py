"""Anytime informative tree planner with tree recycling between cycles."""

import logging
import math
import time
from typing import List, Optional, Tuple

from ..geometry.footprint import edge_footprint, project_footprint
from ..geometry.paths import steer
from ..geometry.pose import Pose
from ..models.planning import Plan, PlannerConfig, PlanRequest
from ..planning.plan_tree import COST_TOLERANCE, PlanTree, replay_gain
from ..planning.rewards import RewardContext, node_information
from ..planning.sampling import InformedSampler
from .base import BasePlanner, Leg

logger = logging.getLogger(__name__)


class InformativeTreePlanner(BasePlanner):
    """Grows a tree of viewing poses toward reward-weighted samples.

    Each cycle either starts a fresh tree at the request start or, when the
    start matches a node of the previously returned plan, recycles the
    surviving subtree against the new belief map and budget. The loop then
    runs until the planning time (or iteration count) is spent and returns
    the root-to-node path with the most information.
    """

    name = "tree"
    adaptive = True

    def __init__(self, config: Optional[PlannerConfig] = None) -> None:
        super().__init__(config)
        self.tree: Optional[PlanTree] = None
        self.last_path: List[int] = []
        self.info_evals = 0
        self.info_time = 0.0

    def reset(self) -> None:
        super().reset()
        self.tree = None
        self.last_path = []

    def fresh_tree(self, start: Pose, budget: float, ctx: RewardContext) -> PlanTree:
        footprint = project_footprint(start, self.camera, ctx.base)
        return PlanTree.with_root(
            start,
            footprint,
            ctx,
            budget,
            closed_epsilon=self.config.closed_epsilon,
            bucket_size=self.config.near_radius,
        )

    def _match(self, start: Pose) -> Optional[int]:
        if self.tree is None:
            return None
        heading_tol = math.radians(self.config.match_heading_tol_deg)
        for node_id in self.last_path:
            node = self.tree.nodes.get(node_id)
            if node is not None and node.pose.matches(
                start, self.config.match_position_tol, heading_tol
            ):
                return node_id
        return None

    def update_graph(self, new_start: Pose, budget: float, ctx: RewardContext) -> Tuple[bool, int]:
        """Recycle the previous tree from ``new_start`` or start over.

        Returns:
            (whether a node matched, number of nodes re-scored)
        """
        match = self._match(new_start) if self.config.recycle else None
        if match is None or self.tree is None:
            self.tree = self.fresh_tree(new_start, budget, ctx)
            return False, 0
        tree = self.tree
        tree.prune_before(match)
        root = tree.node(match)
        root.footprint = project_footprint(root.pose, self.camera, ctx.base)
        scored = tree.update_subtree(match, ctx.base, budget, ctx)
        logger.debug("Recycled %d nodes from node %d", scored, match)
        return True, scored

    def _extend(
        self,
        tree: PlanTree,
        parent_id: int,
        target: Pose,
        request: PlanRequest,
        ctx: RewardContext,
    ) -> Optional[Tuple[Pose, Optional[int]]]:
        """Steer from a node toward ``target`` and attach the result.

        Returns None when steering fails, else the reached pose with the new
        node id, or None as id when a nearby node dominated it.
        """
        cfg = self.config
        parent = tree.nodes[parent_id]
        reach = min(cfg.extend_distance, tree.budget - parent.cost)
        if reach <= COST_TOLERANCE:
            return None
        steered = steer(
            parent.pose,
            target,
            reach,
            request.bounds,
            cfg.turn_radius,
            cfg.bounds_check_spacing,
        )
        if steered is None:
            return None
        pose, edge = steered
        cost = parent.cost + edge.length
        footprint = edge_footprint(edge, self.camera, request.belief)

        started = time.perf_counter()
        if cfg.use_embedding:
            delta, gain = node_information(
                tree.embedding(parent_id), footprint, ctx, ctx.time_at(cost)
            )
        else:
            delta, gain = replay_gain(tree, parent_id, footprint, ctx, ctx.time_at(cost))
        self.info_time += time.perf_counter() - started
        self.info_evals += 1

        if not tree.prune_check(pose, parent.info + gain, cost, cfg.prune_radius):
            return pose, None
        return pose, tree.attach(parent_id, pose, edge, delta, gain, footprint)

    def grow(self, tree: PlanTree, request: PlanRequest, ctx: RewardContext) -> int:
        """Run the sampling loop; returns the iteration count."""
        cfg = self.config
        sampler = InformedSampler(
            request.belief, request.bounds, self.camera, self.sensor, cfg.altitudes
        )
        deadline = time.perf_counter() + cfg.planning_time
        iterations = 0
        while True:
            if cfg.iterations is not None:
                if iterations >= cfg.iterations:
                    break
            elif time.perf_counter() >= deadline:
                break
            iterations += 1

            target = sampler.sample(self.rng)
            nearest = tree.nearest(target)
            if nearest is None:
                logger.debug("Every node is closed after %d iterations", iterations)
                break
            reached = self._extend(tree, nearest, target, request, ctx)
            if reached is None:
                continue
            x_feas, new_id = reached
            # pruned poses still anchor the neighbor expansion
            for neighbor in tree.near(x_feas, cfg.near_radius):
                if neighbor in (nearest, new_id):
                    continue
                self._extend(tree, neighbor, x_feas, request, ctx)
        return iterations

    def plan(self, request: PlanRequest) -> Plan:
        self.check_request(request)
        budget = self.budget_for(request)
        ctx = self.context(request)
        self.info_evals = 0
        self.info_time = 0.0

        started = time.perf_counter()
        matched, recycled = self.update_graph(request.start_pose, budget, ctx)
        update_time = time.perf_counter() - started
        tree = self.tree
        assert tree is not None

        started = time.perf_counter()
        iterations = self.grow(tree, request, ctx)
        build_time = time.perf_counter() - started

        path = tree.best_path()
        self.last_path = path
        root = tree.node(path[0])
        legs: List[Leg] = [
            (edge.geometry, tree.nodes[edge.child].info) for edge in tree.path_edges(path)
        ]
        plan = self.build_plan(root.pose, legs, root.info)
        self.record(
            iterations=iterations,
            tree_size=len(tree),
            matched=matched,
            recycled_nodes=recycled,
            build_time=build_time,
            update_time=update_time,
            info_evals=self.info_evals,
            info_time=self.info_time,
            plan_info=plan.total_info,
            plan_cost=plan.total_cost,
        )
        logger.info(
            "Plan cycle %d: %d nodes, %d iterations, info %.3f, cost %.1f (%s)",
            len(self.stats) - 1,
            len(tree),
            iterations,
            plan.total_info,
            plan.total_cost,
            "recycled" if matched else "fresh",
        )
        return plan
