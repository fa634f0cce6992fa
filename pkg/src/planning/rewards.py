"""Information-gain rewards for poses, edges and trajectories."""

from dataclasses import dataclass
from typing import Dict, Iterable, Mapping, Tuple

import numpy as np

from ..belief.grid import BeliefMap
from ..belief.sensor import SensorModel, entropy, entropy_array, posterior
from ..geometry.footprint import Footprint


@dataclass(frozen=True)
class DecayFunction:
    """Linear decay from 1 down to a floor ``gamma`` at rate ``beta`` per second.

    ``gamma=1, beta=0`` disables decay.
    """

    gamma: float = 1.0
    beta: float = 0.0

    def __post_init__(self) -> None:
        if not (0.0 <= self.gamma <= 1.0):
            raise ValueError(f"gamma must lie in [0, 1], got {self.gamma}")
        if self.beta > 0.0:
            raise ValueError(f"beta must be <= 0, got {self.beta}")
        if self.beta == 0.0 and self.gamma < 1.0:
            raise ValueError("a floor below 1 needs a negative decay rate")

    @property
    def gamma_t(self) -> float:
        """Time at which the floor is reached."""
        if self.beta == 0.0:
            return 0.0
        return (self.gamma - 1.0) / self.beta

    def value(self, t: float) -> float:
        if t < self.gamma_t:
            return self.beta * t + 1.0
        return self.gamma


def decay_value(decay: DecayFunction, t: float) -> float:
    """Γ(t) for ``t >= 0``."""
    if t < 0.0:
        raise ValueError(f"time must be non-negative, got {t}")
    return decay.value(t)


@dataclass(frozen=True)
class RewardContext:
    """Everything a node score depends on besides the footprint."""

    base: BeliefMap
    model: SensorModel
    decay: DecayFunction = DecayFunction()
    speed: float = 25.0
    time_offset: float = 0.0

    def __post_init__(self) -> None:
        if self.speed <= 0.0:
            raise ValueError("speed must be positive")

    def time_at(self, cost: float) -> float:
        """Mission time when a path of the given cost has been flown."""
        return self.time_offset + cost / self.speed


def optimistic_cell_reward(p: float, range_m: float, model: SensorModel) -> Tuple[float, float]:
    """Entropy drop assuming the more likely measurement sign.

    Returns:
        (reward in bits, posterior probability)
    """
    tpr, tnr = model.rates(range_m)
    post = float(
        posterior(np.array([p]), np.array([p >= 0.5]), np.array([tpr]), np.array([tnr]))[0]
    )
    return entropy(p) - entropy(post), post


def weighted_cell_reward(
    p: float,
    range_m: float,
    model: SensorModel,
    priority: float,
    t: float,
    decay: DecayFunction,
) -> float:
    """Priority- and time-weighted optimistic reward for one cell."""
    reward, _ = optimistic_cell_reward(p, range_m, model)
    return priority * decay_value(decay, t) * reward


def optimistic_rewards(
    p: np.ndarray, ranges: np.ndarray, model: SensorModel
) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorized optimistic rewards and posteriors."""
    tpr, tnr = model.rates_array(ranges)
    post = posterior(p, p >= 0.5, tpr, tnr)
    return entropy_array(p) - entropy_array(post), post


def score_cells(
    probs: np.ndarray, footprint: Footprint, ctx: RewardContext, t: float
) -> Tuple[np.ndarray, float]:
    """Posteriors and summed weighted reward for a footprint at known priors.

    Every information value in the package goes through here so that the
    embedded and replayed computations agree bit for bit.
    """
    if len(footprint) == 0:
        return np.empty(0), 0.0
    rewards, post = optimistic_rewards(probs, footprint.ranges, ctx.model)
    weight = ctx.decay.value(t)
    gain = float(np.sum(ctx.base.priority[footprint.cells] * rewards)) * weight
    return post, gain


def resolve_beliefs(
    chain: Iterable[Mapping[int, float]], cells: np.ndarray, base: BeliefMap
) -> np.ndarray:
    """Current beliefs for ``cells`` given deltas ordered nearest ancestor first."""
    probs = base.prob[cells].copy()
    pending: Dict[int, int] = {c: i for i, c in enumerate(cells.tolist())}
    for delta in chain:
        if not pending:
            break
        for cell in pending.keys() & delta.keys():
            probs[pending.pop(cell)] = delta[cell]
    return probs


def node_information(
    parent_embedding: Iterable[Mapping[int, float]],
    footprint: Footprint,
    ctx: RewardContext,
    t_at_node: float,
) -> Tuple[Dict[int, float], float]:
    """Delta map and information gain for a new node.

    Args:
        parent_embedding: Delta maps from the parent back to the root
        footprint: Cells the incoming edge observes
        ctx: Base map, sensor and decay for this planning cycle
        t_at_node: Mission time at the node

    Returns:
        (cell -> posterior, gain in weighted bits)
    """
    if len(footprint) == 0:
        return {}, 0.0
    probs = resolve_beliefs(parent_embedding, footprint.cells, ctx.base)
    post, gain = score_cells(probs, footprint, ctx, t_at_node)
    return dict(zip(footprint.cells.tolist(), post.tolist())), gain


def trajectory_information(
    initial: np.ndarray, final: np.ndarray, priority: np.ndarray
) -> float:
    """Priority-weighted entropy drop between two belief states.

    Matches the accumulated node gains along a path when decay is off.
    """
    drop = entropy_array(initial) - entropy_array(final)
    return float(np.sum(priority * drop))


def single_view_rewards(
    belief: BeliefMap, model: SensorModel, range_m: float
) -> np.ndarray:
    """Priority-weighted reward for viewing every cell once at ``range_m``."""
    ranges = np.full(belief.n_cells, range_m)
    rewards, _ = optimistic_rewards(belief.prob, ranges, model)
    return belief.priority * rewards

