"""Search tree with delta belief embeddings and recycling primitives."""

import logging
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from ..belief.grid import BeliefMap
from ..geometry.footprint import Footprint
from ..geometry.paths import EdgeGeometry
from ..geometry.pose import Pose
from ..models.tree import EdgeRecord, NodeRecord, TreeDump
from .rewards import RewardContext, node_information, resolve_beliefs, score_cells
from .spatial_index import SpatialHashIndex

logger = logging.getLogger(__name__)

COST_TOLERANCE = 1e-6


class TreeError(KeyError):
    """Raised when a node id is not in the tree."""


class BudgetExceededError(ValueError):
    """Raised when a node would cost more than the budget."""


@dataclass(slots=True)
class PlanNode:
    id: int
    pose: Pose
    cost: float
    info: float
    gain: float
    parent: Optional[int]
    delta: Dict[int, float]
    footprint: Footprint
    closed: bool = False
    children: List[int] = field(default_factory=list)


@dataclass(frozen=True)
class TreeEdge:
    parent: int
    child: int
    geometry: EdgeGeometry


class PlanTree:
    """Rooted tree of plan nodes.

    Each node keeps only the posteriors its own footprint changed; beliefs
    for any other cell are found by walking toward the root and finally
    falling back to the base map.
    """

    def __init__(
        self,
        budget: float,
        closed_epsilon: float = 25.0,
        bucket_size: float = 1500.0,
    ) -> None:
        self.budget = budget
        self.closed_epsilon = closed_epsilon
        self.nodes: Dict[int, PlanNode] = {}
        self.edges: Dict[int, TreeEdge] = {}
        self.closed: set = set()
        self.index = SpatialHashIndex(bucket_size)
        self.root: int = -1
        self.last_visits: Counter = Counter()
        self._next_id = 0

    @classmethod
    def with_root(
        cls,
        pose: Pose,
        footprint: Footprint,
        ctx: RewardContext,
        budget: float,
        closed_epsilon: float = 25.0,
        bucket_size: float = 1500.0,
    ) -> "PlanTree":
        """Single-node tree scored with the start pose's own footprint."""
        tree = cls(budget, closed_epsilon, bucket_size)
        delta, gain = node_information((), footprint, ctx, ctx.time_at(0.0))
        tree.root = tree._add(pose, 0.0, gain, gain, None, delta, footprint)
        return tree

    def __len__(self) -> int:
        return len(self.nodes)

    def _add(
        self,
        pose: Pose,
        cost: float,
        info: float,
        gain: float,
        parent: Optional[int],
        delta: Dict[int, float],
        footprint: Footprint,
    ) -> int:
        node_id = self._next_id
        self._next_id += 1
        node = PlanNode(node_id, pose, cost, info, gain, parent, delta, footprint)
        node.closed = self._is_closing(cost)
        self.nodes[node_id] = node
        if node.closed:
            self.closed.add(node_id)
        self.index.insert(node_id, pose.x, pose.y, pose.z)
        if parent is not None:
            self.nodes[parent].children.append(node_id)
        return node_id

    def _is_closing(self, cost: float) -> bool:
        return cost >= self.budget - self.closed_epsilon

    def node(self, node_id: int) -> PlanNode:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise TreeError(f"node {node_id} not in tree") from None

    def is_open(self, node_id: int) -> bool:
        return node_id not in self.closed

    def embedding(self, node_id: int) -> Iterator[Dict[int, float]]:
        """Delta maps from ``node_id`` back to the root."""
        current: Optional[int] = self.node(node_id).id
        while current is not None:
            node = self.nodes[current]
            yield node.delta
            current = node.parent

    def belief_at(self, node_id: int, cell: int, base: BeliefMap) -> float:
        """Belief in ``cell`` after flying the path to ``node_id``."""
        for delta in self.embedding(node_id):
            if cell in delta:
                return delta[cell]
        return float(base.prob[cell])

    def attach(
        self,
        parent_id: int,
        pose: Pose,
        edge: EdgeGeometry,
        delta: Dict[int, float],
        info_gain: float,
        footprint: Optional[Footprint] = None,
    ) -> int:
        """Add a child of ``parent_id`` reached along ``edge``.

        Raises:
            TreeError: If the parent is unknown
            BudgetExceededError: If the child would exceed the budget
        """
        parent = self.node(parent_id)
        if edge.length <= 0.0:
            raise ValueError("edges must have positive length")
        cost = parent.cost + edge.length
        if cost > self.budget + COST_TOLERANCE:
            raise BudgetExceededError(
                f"cost {cost:.1f} exceeds budget {self.budget:.1f}"
            )
        node_id = self._add(
            pose,
            cost,
            parent.info + info_gain,
            info_gain,
            parent_id,
            delta,
            footprint if footprint is not None else Footprint.empty(),
        )
        self.edges[node_id] = TreeEdge(parent_id, node_id, edge)
        return node_id

    def nearest(self, pose: Pose) -> Optional[int]:
        """Closest open node over (x, y, z)."""
        return self.index.nearest(pose.x, pose.y, pose.z, self.is_open)

    def near(self, pose: Pose, radius: float) -> List[int]:
        """Open nodes within ``radius`` of ``pose``."""
        return self.index.near(pose.x, pose.y, pose.z, radius, self.is_open)

    def prune_check(self, pose: Pose, info: float, cost: float, radius: float) -> bool:
        """False when an open node nearby dominates the candidate."""
        for node_id in self.near(pose, radius):
            other = self.nodes[node_id]
            if other.cost <= cost and other.info >= info:
                if other.cost < cost or other.info > info:
                    return False
        return True

    def best_node(self) -> int:
        return min(
            self.nodes.values(), key=lambda n: (-n.info, n.cost, n.id)
        ).id

    def ancestors(self, node_id: int) -> List[int]:
        """Node ids from the root down to ``node_id``."""
        chain = []
        current: Optional[int] = self.node(node_id).id
        while current is not None:
            chain.append(current)
            current = self.nodes[current].parent
        chain.reverse()
        return chain

    def best_path(self) -> List[int]:
        """Root-to-node chain ending at the most informative node."""
        return self.ancestors(self.best_node())

    def path_edges(self, path: List[int]) -> List[TreeEdge]:
        return [self.edges[node_id] for node_id in path[1:]]

    def subtree(self, node_id: int) -> List[int]:
        """Pre-order ids of ``node_id`` and its descendants."""
        order = []
        stack = [self.node(node_id).id]
        while stack:
            current = stack.pop()
            order.append(current)
            stack.extend(reversed(self.nodes[current].children))
        return order

    def _remove(self, node_id: int) -> None:
        node = self.nodes.pop(node_id)
        self.edges.pop(node_id, None)
        self.closed.discard(node_id)
        self.index.remove(node_id)
        if node.parent is not None and node.parent in self.nodes:
            self.nodes[node.parent].children.remove(node_id)

    def prune_before(self, node_id: int) -> None:
        """Make ``node_id`` the root and drop everything not below it.

        The new root's delta becomes the merge of its former ancestor chain,
        so beliefs seen from surviving nodes are unchanged.
        """
        node = self.node(node_id)
        if node_id == self.root:
            return
        merged: Dict[int, float] = {}
        for ancestor in self.ancestors(node_id):
            merged.update(self.nodes[ancestor].delta)
        keep = set(self.subtree(node_id))
        before = len(self.nodes)
        for other in [n for n in self.nodes if n not in keep]:
            self.nodes.pop(other)
            self.edges.pop(other, None)
            self.closed.discard(other)
            self.index.remove(other)
        self.edges.pop(node_id, None)
        node.parent = None
        node.delta = merged
        self.root = node_id
        logger.debug("Pruned %d nodes ahead of new root %d", before - len(self.nodes), node_id)

    def update_subtree(
        self, from_id: int, base: BeliefMap, budget: float, ctx: RewardContext
    ) -> int:
        """Re-score every node below the root against a new base map and budget.

        Costs are re-offset so the root costs 0, nodes over budget are dropped
        with their subtrees, and closed flags are re-derived. Returns the
        number of nodes scored.
        """
        if ctx.base is not base:
            ctx = replace(ctx, base=base)
        self.budget = budget
        self.last_visits = Counter()
        root = self.node(from_id)
        stack = [root.id]
        scored = 0
        while stack:
            node_id = stack.pop()
            node = self.nodes[node_id]
            if node_id == from_id:
                cost, parent_info, chain = 0.0, 0.0, ()
            else:
                parent = self.nodes[node.parent]  # type: ignore[index]
                cost = parent.cost + self.edges[node_id].geometry.length
                parent_info = parent.info
                chain = self.embedding(parent.id)  # type: ignore[assignment]
            if cost > budget + COST_TOLERANCE:
                for doomed in reversed(self.subtree(node_id)):
                    self._remove(doomed)
                continue
            self.last_visits[node_id] += 1
            delta, gain = node_information(chain, node.footprint, ctx, ctx.time_at(cost))
            node.cost = cost
            node.delta = delta
            node.gain = gain
            node.info = parent_info + gain
            node.closed = self._is_closing(cost)
            if node.closed:
                self.closed.add(node_id)
            else:
                self.closed.discard(node_id)
            scored += 1
            stack.extend(reversed(node.children))
        return scored

    def rebuild_naive(self, ctx: RewardContext) -> int:
        """Recompute every node's information by full root-to-node replay."""
        count = 0
        for node_id in self.subtree(self.root):
            self.nodes[node_id].info = replay_information(self, node_id, ctx)
            count += 1
        return count

    def total_delta_entries(self) -> int:
        return sum(len(n.delta) for n in self.nodes.values())

    def dump(self) -> TreeDump:
        nodes = [
            NodeRecord(
                id=n.id,
                parent=n.parent,
                x=n.pose.x,
                y=n.pose.y,
                z=n.pose.z,
                psi=n.pose.psi,
                cost=n.cost,
                info=n.info,
                closed=n.closed,
                delta_size=len(n.delta),
            )
            for n in sorted(self.nodes.values(), key=lambda n: n.id)
        ]
        edges = [
            EdgeRecord(
                parent=e.parent,
                child=e.child,
                length=e.geometry.length,
                word=e.geometry.word,
                segments=[[s.curvature, s.length] for s in e.geometry.segments],
            )
            for e in sorted(self.edges.values(), key=lambda e: e.child)
        ]
        return TreeDump(root=self.root, budget=self.budget, nodes=nodes, edges=edges)


def _replay(tree: PlanTree, node_id: int, ctx: RewardContext) -> Tuple[Dict[int, float], float]:
    """Replay every footprint from the root; (posteriors of touched cells, summed gain)."""
    touched: Dict[int, float] = {}
    info = 0.0
    for current in tree.ancestors(node_id):
        node = tree.nodes[current]
        cells = node.footprint.cells
        prior = resolve_beliefs((touched,), cells, ctx.base)
        post, gain = score_cells(prior, node.footprint, ctx, ctx.time_at(node.cost))
        touched.update(zip(cells.tolist(), np.asarray(post).tolist()))
        info += gain
    return touched, info


def replay_information(tree: PlanTree, node_id: int, ctx: RewardContext) -> float:
    """Cumulative information at a node by replaying every footprint from the root.

    Costs O(path footprints); the base map is only read.
    """
    return _replay(tree, node_id, ctx)[1]


def replay_gain(
    tree: PlanTree,
    parent_id: int,
    footprint: Footprint,
    ctx: RewardContext,
    t_at_node: float,
) -> Tuple[Dict[int, float], float]:
    """Gain and delta of a new child computed without embeddings."""
    touched, _ = _replay(tree, parent_id, ctx)
    prior = resolve_beliefs((touched,), footprint.cells, ctx.base)
    post, gain = score_cells(prior, footprint, ctx, t_at_node)
    return dict(zip(footprint.cells.tolist(), np.asarray(post).tolist())), gain
