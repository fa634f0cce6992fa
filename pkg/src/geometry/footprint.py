"""Camera frustum projection onto the ground grid."""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional

import numpy as np
import shapely
from shapely import affinity
from shapely.geometry import LineString, Point, Polygon

from ..belief.grid import BeliefMap
from .paths import EdgeGeometry
from .pose import GeometryError, Pose

logger = logging.getLogger(__name__)

HORIZON_CLIP = math.radians(1.0)


@dataclass(frozen=True)
class CameraModel:
    """Body-fixed camera looking along the heading, pitched below horizontal.

    The frustum is precomputed once per unit altitude in the body frame
    (x forward, y left); ground footprints scale linearly with altitude and
    are then cut at ``max_range``.
    """

    pitch_down: float
    hfov: float
    vfov: float
    max_range: float
    normalized: Polygon = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not (0.0 < self.hfov < math.pi and 0.0 < self.vfov < math.pi):
            raise GeometryError("fields of view must lie in (0, pi)")
        if not (0.0 <= self.pitch_down <= math.pi / 2.0):
            raise GeometryError("pitch_down must lie in [0, pi/2]")
        if self.max_range <= 0.0:
            raise GeometryError("max_range must be positive")
        polygon = Polygon(self._unit_corners())
        shapely.prepare(polygon)
        object.__setattr__(self, "normalized", polygon)

    @classmethod
    def from_degrees(
        cls,
        pitch_down: float = 30.0,
        hfov: float = 36.9,
        vfov: Optional[float] = None,
        max_range: float = 600.0,
    ) -> "CameraModel":
        return cls(
            pitch_down=math.radians(pitch_down),
            hfov=math.radians(hfov),
            vfov=math.radians(hfov if vfov is None else vfov),
            max_range=max_range,
        )

    def _unit_corners(self) -> list:
        th = math.tan(self.hfov / 2.0)
        tv = math.tan(self.vfov / 2.0)
        sp, cp = math.sin(self.pitch_down), math.cos(self.pitch_down)
        corners = []
        # near-left, near-right, far-right, far-left
        for a, b in ((th, -tv), (-th, -tv), (-th, tv), (th, tv)):
            dx = cp + b * sp
            dy = a
            dz = -sp + b * cp
            horizontal = math.hypot(dx, dy)
            depression = math.atan2(-dz, horizontal)
            if depression < HORIZON_CLIP:
                reach = 1.0 / math.tan(HORIZON_CLIP)
                corners.append((reach * dx / horizontal, reach * dy / horizontal))
            else:
                corners.append((dx / -dz, dy / -dz))
        return corners

    def ground_radius(self, z: float) -> float:
        """Largest ground distance still within ``max_range`` at altitude z."""
        return math.sqrt(max(0.0, self.max_range**2 - z**2))

    def ground_polygon(self, z: float) -> Polygon:
        """Footprint at altitude ``z`` in the body frame, cut at max range."""
        scaled = affinity.scale(self.normalized, z, z, origin=(0.0, 0.0))
        return scaled.intersection(Point(0.0, 0.0).buffer(self.ground_radius(z), 128))

    def lead_distance(self, z: float) -> float:
        """Ground distance from the vehicle to where the central ray lands."""
        if self.pitch_down <= HORIZON_CLIP:
            return self.ground_radius(z)
        return z / math.tan(self.pitch_down)

    def nominal_range(self, z: float) -> float:
        """Slant range along the central ray, capped at max_range."""
        if self.pitch_down <= HORIZON_CLIP:
            return self.max_range
        return min(self.max_range, z / math.sin(self.pitch_down))

    def width_at_fraction(self, z: float, fraction: float) -> float:
        """Lateral footprint width at ``fraction`` of the way from near to far edge."""
        polygon = self.ground_polygon(z)
        if polygon.is_empty:
            return 0.0
        x_near, y_min, x_far, y_max = polygon.bounds
        x_cut = x_near + fraction * (x_far - x_near)
        line = LineString([(x_cut, y_min - 1.0), (x_cut, y_max + 1.0)])
        return float(polygon.intersection(line).length)


@dataclass(frozen=True)
class Footprint:
    """Observed cells with the closest viewing range to each."""

    cells: np.ndarray
    ranges: np.ndarray

    @classmethod
    def empty(cls) -> "Footprint":
        return cls(np.empty(0, dtype=np.int64), np.empty(0, dtype=float))

    def __len__(self) -> int:
        return int(self.cells.size)

    def __contains__(self, idx: object) -> bool:
        return bool(np.any(self.cells == idx))

    def as_dict(self) -> Dict[int, float]:
        return dict(zip(self.cells.tolist(), self.ranges.tolist()))

    def range_of(self, idx: int) -> Optional[float]:
        hit = np.nonzero(self.cells == idx)[0]
        return float(self.ranges[hit[0]]) if hit.size else None


def _min_per_cell(cells: np.ndarray, ranges: np.ndarray) -> Footprint:
    if cells.size == 0:
        return Footprint.empty()
    order = np.lexsort((ranges, cells))
    cells = cells[order]
    ranges = ranges[order]
    unique, first = np.unique(cells, return_index=True)
    return Footprint(unique.astype(np.int64), ranges[first])


def merge_footprints(footprints: Iterable[Footprint]) -> Footprint:
    """Union of footprints keeping the minimum range per cell."""
    parts = list(footprints)
    if not parts:
        return Footprint.empty()
    return _min_per_cell(
        np.concatenate([f.cells for f in parts]), np.concatenate([f.ranges for f in parts])
    )


def observe_states(
    belief: BeliefMap,
    cam: CameraModel,
    x: np.ndarray,
    y: np.ndarray,
    z: np.ndarray,
    psi: np.ndarray,
) -> Footprint:
    """Cells seen from any of the given sensor states, at minimum range."""
    keep = z > 0.0
    x, y, z, psi = x[keep], y[keep], z[keep], psi[keep]
    if x.size == 0:
        return Footprint.empty()

    cs = belief.cell_size
    bx0, by0, bx1, by1 = cam.normalized.bounds
    reach = np.sqrt(np.maximum(cam.max_range**2 - z**2, 0.0))
    lo_x = np.maximum(bx0 * z, -reach)
    hi_x = np.minimum(bx1 * z, reach)
    lo_y = np.maximum(by0 * z, -reach)
    hi_y = np.minimum(by1 * z, reach)
    mid_x = 0.5 * (lo_x + hi_x)
    mid_y = 0.5 * (lo_y + hi_y)
    half = 0.5 * np.hypot(hi_x - lo_x, hi_y - lo_y)
    k = int(math.ceil(float(np.max(half)) / cs)) + 1

    cos_p, sin_p = np.cos(psi), np.sin(psi)
    wx = x + mid_x * cos_p - mid_y * sin_p
    wy = y + mid_x * sin_p + mid_y * cos_p
    col_c = np.floor((wx - belief.origin[0]) / cs).astype(np.int64)
    row_c = np.floor((wy - belief.origin[1]) / cs).astype(np.int64)

    offs = np.arange(-k, k + 1)
    rows, cols = np.broadcast_arrays(
        row_c[:, None, None] + offs[None, :, None],
        col_c[:, None, None] + offs[None, None, :],
    )
    sample = np.broadcast_to(np.arange(x.size)[:, None, None], rows.shape).ravel()
    rows = rows.ravel()
    cols = cols.ravel()

    valid = (rows >= 0) & (rows < belief.n_rows) & (cols >= 0) & (cols < belief.n_cols)
    rows, cols, sample = rows[valid], cols[valid], sample[valid]
    if rows.size == 0:
        return Footprint.empty()
    idx = rows * belief.n_cols + cols

    dx = belief.center_x[idx] - x[sample]
    dy = belief.center_y[idx] - y[sample]
    dz = z[sample]
    rng = np.sqrt(dx * dx + dy * dy + dz * dz)
    near = rng <= cam.max_range
    idx, dx, dy, dz, rng, sample = idx[near], dx[near], dy[near], dz[near], rng[near], sample[near]

    c, s = cos_p[sample], sin_p[sample]
    body_x = (dx * c + dy * s) / dz
    body_y = (-dx * s + dy * c) / dz
    inside = shapely.intersects_xy(cam.normalized, body_x, body_y)
    return _min_per_cell(idx[inside], rng[inside])


def project_footprint(pose: Pose, cam: CameraModel, belief: BeliefMap) -> Footprint:
    """Cells whose centers fall inside the ground projection of the frustum.

    Raises:
        GeometryError: If the pose is not above ground
    """
    if pose.z <= 0.0:
        raise GeometryError(f"sensor must be above ground, got z={pose.z}")
    return observe_states(
        belief,
        cam,
        np.array([pose.x]),
        np.array([pose.y]),
        np.array([pose.z]),
        np.array([pose.psi]),
    )


def edge_footprint(
    edge: EdgeGeometry,
    cam: CameraModel,
    belief: BeliefMap,
    samples: Optional[int] = None,
) -> Footprint:
    """Union of footprints along an edge with each cell's closest viewing range.

    ``samples`` defaults to one state per half cell of arc length, endpoints
    included.
    """
    if edge.length <= 0.0:
        return project_footprint(edge.start, cam, belief)
    if samples is None:
        samples = int(math.ceil(edge.length / (0.5 * belief.cell_size))) + 1
    x, y, z, psi = edge.sample(count=max(2, samples))
    return observe_states(belief, cam, x, y, z, psi)
