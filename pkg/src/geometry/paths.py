"""Curvature-bounded paths: constant-curvature segments, Dubins words, steering."""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from .bounds import Bounds
from .pose import Pose

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
DUBINS_WORDS = ("LSL", "LSR", "RSL", "RSR", "RLR", "LRL")

_STRAIGHT = 1e-12


@dataclass(frozen=True, slots=True)
class Segment:
    """Constant-curvature piece; positive curvature turns left."""

    curvature: float
    length: float


@dataclass(frozen=True)
class EdgeGeometry:
    """A planar chain of segments from ``start`` with a linear altitude ramp."""

    start: Pose
    segments: Tuple[Segment, ...]
    z_end: float
    word: str = ""
    length: float = field(init=False)

    def __post_init__(self) -> None:
        lengths = np.array([s.length for s in self.segments], dtype=float)
        if np.any(lengths < 0.0):
            raise ValueError("segment lengths must be non-negative")
        offsets = np.concatenate(([0.0], np.cumsum(lengths)))
        object.__setattr__(self, "length", float(offsets[-1]))
        object.__setattr__(self, "_offsets", offsets)
        object.__setattr__(
            self, "_curv", np.array([s.curvature for s in self.segments], dtype=float)
        )

        # planar state at each segment start
        xs, ys, psis = [self.start.x], [self.start.y], [self.start.psi]
        for seg in self.segments[:-1]:
            x, y, psi = _advance(xs[-1], ys[-1], psis[-1], seg.curvature, seg.length)
            xs.append(float(x))
            ys.append(float(y))
            psis.append(float(psi))
        object.__setattr__(self, "_x0", np.array(xs))
        object.__setattr__(self, "_y0", np.array(ys))
        object.__setattr__(self, "_psi0", np.array(psis))

    @property
    def max_curvature(self) -> float:
        return max((abs(s.curvature) for s in self.segments), default=0.0)

    def states(self, s: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(x, y, z, psi) at arc lengths ``s``; psi is not wrapped."""
        s = np.clip(np.asarray(s, dtype=float), 0.0, self.length)
        offsets: np.ndarray = self._offsets  # type: ignore[attr-defined]
        n_seg = len(self.segments)
        idx = np.clip(np.searchsorted(offsets[1:], s, side="right"), 0, n_seg - 1)
        local = s - offsets[idx]
        k = self._curv[idx]  # type: ignore[attr-defined]
        x0 = self._x0[idx]  # type: ignore[attr-defined]
        y0 = self._y0[idx]  # type: ignore[attr-defined]
        psi0 = self._psi0[idx]  # type: ignore[attr-defined]
        x, y, psi = _advance(x0, y0, psi0, k, local)
        if self.length > 0.0:
            z = self.start.z + (self.z_end - self.start.z) * (s / self.length)
        else:
            z = np.full_like(s, self.start.z)
        return x, y, z, psi

    def pose_at(self, s: float) -> Pose:
        x, y, z, psi = self.states(np.array([s]))
        return Pose(float(x[0]), float(y[0]), max(0.0, float(z[0])), float(psi[0]))

    @property
    def end_pose(self) -> Pose:
        return self.pose_at(self.length)

    def sample(
        self, spacing: Optional[float] = None, count: Optional[int] = None
    ) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Evenly spaced states including both endpoints."""
        if count is None:
            step = spacing if spacing else 1.0
            count = max(2, int(math.ceil(self.length / step)) + 1)
        if self.length <= 0.0:
            count = 1
        return self.states(np.linspace(0.0, self.length, count))

    def truncated(self, length: float) -> "EdgeGeometry":
        """Prefix of this path of the given arc length."""
        if length >= self.length:
            return self
        length = max(0.0, length)
        kept = []
        remaining = length
        for seg in self.segments:
            if remaining <= 0.0:
                break
            take = min(seg.length, remaining)
            kept.append(Segment(seg.curvature, take))
            remaining -= take
        z_cut = self.start.z + (self.z_end - self.start.z) * (length / self.length)
        return EdgeGeometry(self.start, tuple(kept) or (Segment(0.0, 0.0),), z_cut, self.word)

    def inside(self, bounds: Bounds, spacing: float = 1.0) -> bool:
        """True if every sample at ``spacing`` metres lies within ``bounds``."""
        x, y, _, _ = self.sample(spacing=spacing)
        return bounds.contains_all(x, y)


def _advance(x0, y0, psi0, k, s):  # type: ignore[no-untyped-def]
    k = np.asarray(k, dtype=float)
    straight = np.abs(k) < _STRAIGHT
    k_safe = np.where(straight, 1.0, k)
    psi = psi0 + k * s
    x = np.where(
        straight, x0 + s * np.cos(psi0), x0 + (np.sin(psi) - np.sin(psi0)) / k_safe
    )
    y = np.where(
        straight, y0 + s * np.sin(psi0), y0 + (np.cos(psi0) - np.cos(psi)) / k_safe
    )
    return x, y, psi


def arc(start: Pose, curvature: float, length: float, z_end: Optional[float] = None) -> EdgeGeometry:
    """Single constant-curvature motion primitive."""
    return EdgeGeometry(
        start, (Segment(curvature, length),), start.z if z_end is None else z_end, "arc"
    )


def _mod2pi(a: float) -> float:
    return a - TWO_PI * math.floor(a / TWO_PI)


def dubins_words(start: Pose, goal: Pose, r_min: float) -> Dict[str, Tuple[float, float, float]]:
    """Normalized (t, p, q) segment parameters of every feasible Dubins word.

    Lengths are in units of ``r_min``; altitude is ignored.
    """
    dx = goal.x - start.x
    dy = goal.y - start.y
    d = math.hypot(dx, dy) / r_min
    theta = _mod2pi(math.atan2(dy, dx)) if d > 0.0 else 0.0
    alpha = _mod2pi(start.psi - theta)
    beta = _mod2pi(goal.psi - theta)
    sa, sb = math.sin(alpha), math.sin(beta)
    ca, cb = math.cos(alpha), math.cos(beta)
    c_ab = math.cos(alpha - beta)
    d_sq = d * d
    words: Dict[str, Tuple[float, float, float]] = {}

    p_sq = 2.0 + d_sq - 2.0 * c_ab + 2.0 * d * (sa - sb)
    if p_sq >= 0.0:
        tmp1 = math.atan2(cb - ca, d + sa - sb)
        words["LSL"] = (_mod2pi(tmp1 - alpha), math.sqrt(p_sq), _mod2pi(beta - tmp1))

    p_sq = 2.0 + d_sq - 2.0 * c_ab + 2.0 * d * (sb - sa)
    if p_sq >= 0.0:
        tmp1 = math.atan2(ca - cb, d - sa + sb)
        words["RSR"] = (_mod2pi(alpha - tmp1), math.sqrt(p_sq), _mod2pi(tmp1 - beta))

    p_sq = -2.0 + d_sq + 2.0 * c_ab + 2.0 * d * (sa + sb)
    if p_sq >= 0.0:
        p = math.sqrt(p_sq)
        tmp0 = math.atan2(-ca - cb, d + sa + sb) - math.atan2(-2.0, p)
        words["LSR"] = (_mod2pi(tmp0 - alpha), p, _mod2pi(tmp0 - beta))

    p_sq = -2.0 + d_sq + 2.0 * c_ab - 2.0 * d * (sa + sb)
    if p_sq >= 0.0:
        p = math.sqrt(p_sq)
        tmp0 = math.atan2(ca + cb, d - sa - sb) - math.atan2(2.0, p)
        words["RSL"] = (_mod2pi(alpha - tmp0), p, _mod2pi(beta - tmp0))

    tmp0 = (6.0 - d_sq + 2.0 * c_ab + 2.0 * d * (sa - sb)) / 8.0
    if abs(tmp0) <= 1.0:
        phi = math.atan2(ca - cb, d - sa + sb)
        p = _mod2pi(TWO_PI - math.acos(tmp0))
        t = _mod2pi(alpha - phi + _mod2pi(p / 2.0))
        words["RLR"] = (t, p, _mod2pi(alpha - beta - t + _mod2pi(p)))

    tmp0 = (6.0 - d_sq + 2.0 * c_ab + 2.0 * d * (sb - sa)) / 8.0
    if abs(tmp0) <= 1.0:
        phi = math.atan2(ca - cb, d + sa - sb)
        p = _mod2pi(TWO_PI - math.acos(tmp0))
        t = _mod2pi(-alpha - phi + p / 2.0)
        words["LRL"] = (t, p, _mod2pi(beta - alpha - t + _mod2pi(p)))

    return words


def word_geometry(
    start: Pose, goal_z: float, word: str, params: Tuple[float, float, float], r_min: float
) -> EdgeGeometry:
    """Build the path for one Dubins word from its normalized parameters."""
    segments = []
    for letter, param in zip(word, params):
        if letter == "L":
            curvature = 1.0 / r_min
        elif letter == "R":
            curvature = -1.0 / r_min
        else:
            curvature = 0.0
        if param * r_min > 0.0:
            segments.append(Segment(curvature, param * r_min))
    return EdgeGeometry(start, tuple(segments) or (Segment(0.0, 0.0),), goal_z, word)


def dubins_path(start: Pose, goal: Pose, r_min: float) -> Optional[EdgeGeometry]:
    """Shortest Dubins path in the plane with a linear altitude blend.

    Returns None when start and goal coincide.
    """
    words = dubins_words(start, goal, r_min)
    if not words:
        return None
    word, params = min(words.items(), key=lambda item: (sum(item[1]), item[0]))
    if sum(params) * r_min <= 1e-9:
        return None
    return word_geometry(start, goal.z, word, params, r_min)


def dubins_path_inside(
    start: Pose, goal: Pose, r_min: float, bounds: Bounds, check_spacing: float = 1.0
) -> Optional[EdgeGeometry]:
    """Shortest Dubins word that stays within ``bounds``, or None."""
    words = sorted(dubins_words(start, goal, r_min).items(), key=lambda item: (sum(item[1]), item[0]))
    for word, params in words:
        if sum(params) * r_min <= 1e-9:
            return None
        path = word_geometry(start, goal.z, word, params, r_min)
        if path.inside(bounds, check_spacing):
            return path
    return None


def steer(
    start: Pose,
    target: Pose,
    max_length: float,
    bounds: Bounds,
    r_min: float,
    check_spacing: float = 1.0,
) -> Optional[Tuple[Pose, EdgeGeometry]]:
    """Curvature-feasible edge from ``start`` toward ``target``.

    The shortest Dubins path is cut at ``max_length``; the reached pose takes
    the path tangent as its heading. Returns None when no path exists or the
    path leaves ``bounds``.
    """
    if max_length <= 0.0:
        return None
    path = dubins_path(start, target, r_min)
    if path is None:
        return None
    if path.length > max_length:
        path = path.truncated(max_length)
    if not path.inside(bounds, check_spacing):
        return None
    return path.end_pose, path
