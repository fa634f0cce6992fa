"""Plan tree embedding, pruning and recycling tests."""

import math

import numpy as np
import pytest

from src.belief.grid import BeliefMap
from src.geometry.footprint import Footprint
from src.geometry.paths import arc
from src.geometry.pose import Pose
from src.planning.plan_tree import (
    BudgetExceededError,
    PlanTree,
    TreeError,
    replay_gain,
    replay_information,
)
from src.planning.rewards import DecayFunction, RewardContext, node_information

pytestmark = pytest.mark.unit

ORIGIN = Pose(0.0, 0.0, 50.0, 0.0)


def _tree(ctx, budget=15000.0):
    return PlanTree.with_root(ORIGIN, Footprint.empty(), ctx, budget)


def _child(tree, parent, length, gain=0.0, delta=None, curvature=0.0):
    edge = arc(tree.nodes[parent].pose, curvature, length)
    return tree.attach(parent, edge.end_pose, edge, delta or {}, gain)


def _random_footprint(rng, n_cells):
    k = int(rng.integers(1, 12))
    cells = np.sort(rng.choice(n_cells, size=k, replace=False))
    return Footprint(cells.astype(np.int64), rng.uniform(50.0, 650.0, k))


def _random_tree(rng, ctx, n_nodes):
    """Tree of random footprints grown through the embedding path."""
    n_cells = ctx.base.n_cells
    tree = PlanTree.with_root(ORIGIN, _random_footprint(rng, n_cells), ctx, 1e9)
    for _ in range(n_nodes - 1):
        parent = int(rng.choice(list(tree.nodes)))
        edge = arc(tree.nodes[parent].pose, float(rng.uniform(-0.01, 0.01)), float(rng.uniform(10, 100)))
        fp = _random_footprint(rng, n_cells)
        cost = tree.nodes[parent].cost + edge.length
        delta, gain = node_information(tree.embedding(parent), fp, ctx, ctx.time_at(cost))
        tree.attach(parent, edge.end_pose, edge, delta, gain, fp)
    return tree


def _random_base(rng):
    base = BeliefMap(15.0, 20, 20, prob=rng.uniform(0.0, 1.0, 400))
    base.priority[:] = rng.choice([0.5, 1.0, 3.0], 400)
    return base


def test_attach_accumulates_cost_and_info(reward_context):
    tree = _tree(reward_context)
    child = _child(tree, tree.root, 500.0, gain=0.5)
    node = tree.node(child)
    assert node.cost == pytest.approx(500.0)
    assert node.info == pytest.approx(0.5)
    assert node.parent == tree.root
    assert child in tree.nodes[tree.root].children


def test_attach_closes_near_budget(reward_context):
    tree = _tree(reward_context)
    a = _child(tree, tree.root, 14990.0)
    b = _child(tree, a, 10.0)
    assert not tree.is_open(b)
    assert tree.node(b).closed
    with pytest.raises(BudgetExceededError):
        _child(tree, a, 200.0)


def test_attach_rejects_unknown_parent_and_empty_edges(reward_context):
    tree = _tree(reward_context)
    edge = arc(ORIGIN, 0.0, 10.0)
    with pytest.raises(TreeError):
        tree.attach(99, edge.end_pose, edge, {}, 0.0)
    with pytest.raises(ValueError):
        tree.attach(tree.root, ORIGIN, arc(ORIGIN, 0.0, 0.0), {}, 0.0)
    with pytest.raises(TreeError):
        tree.node(42)


def test_belief_at_walks_toward_root(reward_context, small_map):
    tree = _tree(reward_context)
    tree.nodes[tree.root].delta = {5: 0.9}
    a = _child(tree, tree.root, 100.0)
    b = _child(tree, a, 100.0, delta={5: 0.97})
    assert tree.belief_at(b, 5, small_map) == pytest.approx(0.97)
    assert tree.belief_at(a, 5, small_map) == pytest.approx(0.9)
    assert tree.belief_at(tree.root, 6, small_map) == pytest.approx(0.5)


def test_prune_check_examples(reward_context):
    tree = _tree(reward_context)
    _child(tree, tree.root, 400.0, gain=2.0)
    candidate = Pose(410.0, 0.0, 50.0, 0.0)
    assert tree.prune_check(candidate, 1.5, 500.0, 100.0) is False
    assert tree.prune_check(candidate, 2.5, 500.0, 100.0) is True
    assert tree.prune_check(Pose(3000.0, 3000.0, 50.0, 0.0), 0.0, 500.0, 100.0) is True


def test_best_path_prefers_info_then_cost(reward_context):
    tree = _tree(reward_context)
    _child(tree, tree.root, 700.0, gain=1.2)
    _child(tree, tree.root, 900.0, gain=3.4, curvature=0.001)
    cheap = _child(tree, tree.root, 800.0, gain=3.4, curvature=-0.001)
    _child(tree, tree.root, 1000.0, gain=3.4, curvature=0.002)
    assert tree.best_path() == [tree.root, cheap]


def test_best_path_of_single_node_tree(reward_context):
    tree = _tree(reward_context)
    assert tree.best_path() == [tree.root]


def test_prune_before_merges_ancestor_deltas(reward_context, small_map):
    tree = _tree(reward_context)
    a = _child(tree, tree.root, 100.0, delta={1: 0.9})
    b = _child(tree, a, 100.0, delta={2: 0.8})
    c = _child(tree, b, 100.0, delta={3: 0.7})
    sibling = _child(tree, a, 150.0, delta={4: 0.6}, curvature=0.005)
    tree.prune_before(b)
    assert tree.root == b
    assert set(tree.nodes) == {b, c}
    assert sibling not in tree.index
    assert tree.node(b).parent is None
    assert tree.node(b).delta == {1: 0.9, 2: 0.8}
    assert tree.belief_at(c, 1, small_map) == pytest.approx(0.9)
    assert tree.belief_at(c, 3, small_map) == pytest.approx(0.7)


def test_prune_before_root_is_identity(reward_context):
    tree = _tree(reward_context)
    a = _child(tree, tree.root, 100.0)
    tree.prune_before(tree.root)
    assert set(tree.nodes) == {tree.root, a}


def test_embedding_matches_replay_on_random_trees(sensor):
    rng = np.random.default_rng(2024)
    for trial in range(60):
        base = _random_base(rng)
        decay = DecayFunction(0.5, -0.001) if trial % 2 else DecayFunction()
        ctx = RewardContext(base=base, model=sensor, decay=decay)
        tree = _random_tree(rng, ctx, int(rng.integers(2, 60)))
        for node_id in tree.nodes:
            assert tree.node(node_id).info == pytest.approx(
                replay_information(tree, node_id, ctx), abs=1e-9
            )


def test_replay_gain_matches_embedding(sensor):
    rng = np.random.default_rng(5)
    ctx = RewardContext(base=_random_base(rng), model=sensor)
    tree = _random_tree(rng, ctx, 30)
    fp = _random_footprint(rng, ctx.base.n_cells)
    for parent in list(tree.nodes)[:10]:
        a_delta, a_gain = node_information(tree.embedding(parent), fp, ctx, 10.0)
        b_delta, b_gain = replay_gain(tree, parent, fp, ctx, 10.0)
        assert a_gain == pytest.approx(b_gain, abs=1e-12)
        assert a_delta == pytest.approx(b_delta)


class _WholeMapGuard(np.ndarray):
    """Belief array that fails any copy of the full map."""

    limit = 400

    def copy(self, *args, **kwargs):
        assert self.size < self.limit, "whole belief map copied"
        return super().copy(*args, **kwargs)


def test_replay_touches_only_path_cells(sensor):
    rng = np.random.default_rng(6)
    ctx = RewardContext(base=_random_base(rng), model=sensor)
    tree = _random_tree(rng, ctx, 30)
    fp = _random_footprint(rng, ctx.base.n_cells)
    expected = {
        parent: (replay_gain(tree, parent, fp, ctx, 10.0), replay_information(tree, parent, ctx))
        for parent in tree.nodes
    }
    original = ctx.base.prob.copy()
    ctx.base.prob = ctx.base.prob.view(_WholeMapGuard)
    for parent, ((delta, gain), info) in expected.items():
        b_delta, b_gain = replay_gain(tree, parent, fp, ctx, 10.0)
        assert set(b_delta) == set(fp.cells.tolist())
        assert (b_delta, b_gain) == (delta, gain)
        assert replay_information(tree, parent, ctx) == info
    assert np.array_equal(np.asarray(ctx.base.prob), original)


def test_update_subtree_is_idempotent(sensor):
    rng = np.random.default_rng(9)
    ctx = RewardContext(base=_random_base(rng), model=sensor)
    tree = _random_tree(rng, ctx, 40)
    before = {n: tree.node(n).info for n in tree.nodes}
    scored = tree.update_subtree(tree.root, ctx.base, tree.budget, ctx)
    assert scored == len(tree)
    for node_id, info in before.items():
        assert tree.node(node_id).info == pytest.approx(info, abs=1e-12)


def test_update_subtree_against_new_map_visits_each_node_once(sensor):
    rng = np.random.default_rng(10)
    ctx = RewardContext(base=_random_base(rng), model=sensor)
    tree = _random_tree(rng, ctx, 50)
    fresh = RewardContext(base=_random_base(rng), model=sensor, time_offset=30.0)
    tree.update_subtree(tree.root, fresh.base, tree.budget, fresh)
    assert set(tree.last_visits) == set(tree.nodes)
    assert set(tree.last_visits.values()) == {1}
    for node_id in tree.nodes:
        assert tree.node(node_id).info == pytest.approx(
            replay_information(tree, node_id, fresh), abs=1e-9
        )


def test_update_subtree_on_certain_map_zeroes_info(sensor):
    rng = np.random.default_rng(11)
    ctx = RewardContext(base=_random_base(rng), model=sensor)
    tree = _random_tree(rng, ctx, 25)
    certain = BeliefMap(15.0, 20, 20, prob=np.zeros(400))
    tree.update_subtree(tree.root, certain, tree.budget, RewardContext(base=certain, model=sensor))
    assert all(n.info == 0.0 for n in tree.nodes.values())


def test_update_subtree_drops_nodes_over_budget(reward_context):
    tree = _tree(reward_context)
    a = _child(tree, tree.root, 300.0)
    b = _child(tree, a, 300.0)
    _child(tree, b, 300.0)
    tree.update_subtree(tree.root, reward_context.base, 620.0, reward_context)
    assert set(tree.nodes) == {tree.root, a, b}
    assert all(n.cost <= 620.0 + 1e-6 for n in tree.nodes.values())
    assert tree.node(b).closed


def test_rebuild_naive_matches_embedding(sensor):
    rng = np.random.default_rng(12)
    ctx = RewardContext(base=_random_base(rng), model=sensor)
    tree = _random_tree(rng, ctx, 30)
    before = {n: tree.node(n).info for n in tree.nodes}
    assert tree.rebuild_naive(ctx) == len(tree)
    for node_id, info in before.items():
        assert tree.node(node_id).info == pytest.approx(info, abs=1e-9)


def test_nearest_and_near_skip_closed_nodes(reward_context):
    tree = _tree(reward_context, budget=1000.0)
    open_node = _child(tree, tree.root, 500.0)
    closed = _child(tree, open_node, 490.0)
    end = tree.node(closed).pose
    assert tree.nearest(end) == open_node
    assert closed not in tree.near(end, 2000.0)


def test_dump_lists_nodes_and_edges(reward_context):
    tree = _tree(reward_context)
    a = _child(tree, tree.root, 100.0, gain=0.3)
    dump = tree.dump()
    assert dump.root == tree.root
    assert [n.id for n in dump.nodes] == [tree.root, a]
    assert dump.edges[0].child == a
    assert dump.edges[0].length == pytest.approx(100.0)
    assert math.isclose(dump.nodes[1].info, 0.3)
