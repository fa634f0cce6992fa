"""Reward-weighted sampling of viewing poses."""

import logging
import math
from typing import TYPE_CHECKING, Dict, Sequence, Tuple

import numpy as np
import shapely
from shapely.geometry import Polygon

from ..belief.grid import BeliefMap
from ..belief.sensor import SensorModel
from ..geometry.bounds import Bounds
from ..geometry.footprint import CameraModel
from ..geometry.pose import Pose
from .rewards import single_view_rewards

if TYPE_CHECKING:
    from ..models.planning import PlannerConfig

logger = logging.getLogger(__name__)


class InformedSampler:
    """Draws poses that view a cell chosen in proportion to its reward.

    A cell is picked with probability proportional to its priority-weighted
    single-view reward at the nominal viewing range. The pose is then drawn
    uniformly from those that see the cell center: altitude from the
    discrete set, heading uniform, and ground offset uniform over the
    footprint at that altitude.
    """

    def __init__(
        self,
        belief: BeliefMap,
        bounds: Bounds,
        cam: CameraModel,
        model: SensorModel,
        altitudes: Sequence[float],
        max_attempts: int = 100,
    ) -> None:
        self.belief = belief
        self.bounds = bounds
        self.altitudes = [float(z) for z in altitudes]
        self.max_attempts = max_attempts

        nominal = cam.nominal_range(float(np.mean(self.altitudes)))
        weights = single_view_rewards(belief, model, nominal)
        inside = (
            (belief.center_x >= bounds.x_min)
            & (belief.center_x <= bounds.x_max)
            & (belief.center_y >= bounds.y_min)
            & (belief.center_y <= bounds.y_max)
        )
        weights = np.where(inside & (weights > 0.0), weights, 0.0)
        self.cumulative = np.cumsum(weights)
        self.total = float(self.cumulative[-1]) if weights.size else 0.0

        self._polygons: Dict[float, Tuple[Polygon, Tuple[float, float, float, float]]] = {}
        for z in set(self.altitudes):
            polygon = cam.ground_polygon(z)
            if not polygon.is_empty:
                shapely.prepare(polygon)
                self._polygons[z] = (polygon, polygon.bounds)

    @property
    def informative(self) -> bool:
        return self.total > 0.0 and bool(self._polygons)

    def sample_cell(self, rng: np.random.Generator) -> int:
        target = rng.random() * self.total
        idx = int(np.searchsorted(self.cumulative, target, side="right"))
        return min(idx, self.cumulative.size - 1)

    def _offset(self, z: float, rng: np.random.Generator) -> Tuple[float, float]:
        polygon, (x0, y0, x1, y1) = self._polygons[z]
        while True:
            xs = rng.uniform(x0, x1, 16)
            ys = rng.uniform(y0, y1, 16)
            hits = np.nonzero(shapely.contains_xy(polygon, xs, ys))[0]
            if hits.size:
                return float(xs[hits[0]]), float(ys[hits[0]])

    def uniform(self, rng: np.random.Generator) -> Pose:
        b = self.bounds
        x = rng.uniform(b.x_min, b.x_max)
        y = rng.uniform(b.y_min, b.y_max)
        z = self.altitudes[int(rng.integers(len(self.altitudes)))]
        psi = rng.uniform(-math.pi, math.pi)
        return Pose(x, y, z, psi)

    def sample(self, rng: np.random.Generator) -> Pose:
        if not self.informative:
            return self.uniform(rng)
        cell = self.sample_cell(rng)
        cx, cy = self.belief.cell_center(cell)
        viewing = [z for z in self.altitudes if z in self._polygons]
        for _ in range(self.max_attempts):
            z = viewing[int(rng.integers(len(viewing)))]
            psi = rng.uniform(-math.pi, math.pi)
            ox, oy = self._offset(z, rng)
            c, s = math.cos(psi), math.sin(psi)
            x = cx - (ox * c - oy * s)
            y = cy - (ox * s + oy * c)
            if self.bounds.contains(x, y):
                return Pose(x, y, z, psi)
        logger.debug("No in-bounds viewpoint for cell %d, sampling uniformly", cell)
        return self.uniform(rng)


def informed_sample(
    belief: BeliefMap,
    bounds: Bounds,
    cam: CameraModel,
    config: "PlannerConfig",
    rng: np.random.Generator,
) -> Pose:
    """One reward-weighted viewing pose; uniform when nothing is worth seeing."""
    sampler = InformedSampler(belief, bounds, cam, config.sensor.build(), config.altitudes)
    return sampler.sample(rng)
