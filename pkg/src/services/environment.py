"""Random environment generation and rasterization."""

import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from ..belief.grid import BeliefMap
from ..geometry.bounds import Bounds
from ..models.bench import EnvDistribution, EnvSpec, GaussianPrior

logger = logging.getLogger(__name__)


def rasterize(spec: EnvSpec) -> BeliefMap:
    """Belief map with p = clamp(sum of Gaussian bumps, 0, cap) and region priorities."""
    bounds = spec.bounds
    belief = BeliefMap.uniform(
        bounds.width, bounds.height, spec.cell_size, 0.0, origin=(bounds.x_min, bounds.y_min)
    )
    prob = np.zeros(belief.n_cells)
    for prior in spec.priors:
        d2 = (belief.center_x - prior.x) ** 2 + (belief.center_y - prior.y) ** 2
        prob += prior.peak * np.exp(-d2 / (2.0 * prior.sigma**2))
    belief.prob[:] = np.clip(prob, 0.0, spec.prob_cap)
    for region in spec.priority_regions:
        r = region.bounds
        inside = (
            (belief.center_x >= r.x_min)
            & (belief.center_x <= r.x_max)
            & (belief.center_y >= r.y_min)
            & (belief.center_y <= r.y_max)
        )
        belief.priority[inside] = region.weight
    return belief


def generate_env(
    dist: EnvDistribution,
    bounds: Bounds,
    cell_size: float,
    rng: np.random.Generator,
    count: Optional[int] = None,
    seed: Optional[int] = None,
) -> "Environment":
    """Draw cluster count, centers, widths and peaks, then rasterize.

    Args:
        dist: Ranges to draw from
        bounds: Search rectangle
        cell_size: Grid resolution (m)
        rng: Random source; a fixed seed gives an identical map
        count: Force the number of clusters
        seed: Recorded in the spec for reproducibility headers
    """
    n = int(rng.integers(dist.count_min, dist.count_max + 1)) if count is None else count
    priors = [
        GaussianPrior(
            x=float(rng.uniform(bounds.x_min, bounds.x_max)),
            y=float(rng.uniform(bounds.y_min, bounds.y_max)),
            sigma=float(rng.uniform(dist.sigma_min, dist.sigma_max)),
            peak=float(rng.uniform(dist.peak_min, dist.peak_max)),
        )
        for _ in range(n)
    ]
    spec = EnvSpec(bounds=bounds, cell_size=cell_size, priors=priors, seed=seed)
    logger.debug("Generated environment with %d clusters", n)
    return Environment.from_spec(spec)


def sample_truth(belief: BeliefMap, rng: np.random.Generator) -> np.ndarray:
    """Per-cell occupancy drawn once from the prior."""
    return rng.random(belief.n_cells) < belief.prob


@dataclass
class Environment:
    spec: EnvSpec
    belief: BeliefMap

    @classmethod
    def from_spec(cls, spec: EnvSpec) -> "Environment":
        return cls(spec, rasterize(spec))

    @property
    def bounds(self) -> Bounds:
        return self.spec.bounds

    def truth(self, rng: np.random.Generator) -> np.ndarray:
        return sample_truth(self.belief, rng)

    def cluster_masks(self, radius_sigmas: float = 1.0) -> List[np.ndarray]:
        """Cells within ``radius_sigmas`` standard deviations of each cluster center."""
        belief = self.belief
        masks = []
        for prior in self.spec.priors:
            d2 = (belief.center_x - prior.x) ** 2 + (belief.center_y - prior.y) ** 2
            mask = d2 <= (radius_sigmas * prior.sigma) ** 2
            if not mask.any():
                cell = belief.cell_at(prior.x, prior.y)
                if cell is not None:
                    mask[cell] = True
            masks.append(mask)
        return masks
