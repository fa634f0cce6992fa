"""Range-dependent detector model and the Bayes/entropy primitives."""

import math
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

# Posteriors are kept this far from 0 and 1 unless the prior already was.
PROBABILITY_EPSILON = 1e-6

UNINFORMATIVE = (0.5, 0.5)

ArrayLike = Union[float, np.ndarray]


class BeliefMapError(ValueError):
    """Raised for probabilities or grids that violate the belief-map contract."""


@dataclass(frozen=True)
class Measurement:
    """A binary detection outcome observed at a given range."""

    positive: bool
    range: float

    def __post_init__(self) -> None:
        if self.range < 0.0:
            raise BeliefMapError(f"measurement range must be >= 0, got {self.range}")


@dataclass(frozen=True)
class SensorModel:
    """Piecewise-linear lookup table from viewing range to (TPR, TNR).

    Breakpoints are ``(range_m, tpr, tnr)`` triples with strictly increasing
    ranges starting at 0. Between breakpoints rates are interpolated linearly,
    past the last breakpoint the last rates hold, and beyond ``max_range``
    the detector is uninformative.
    """

    breakpoints: Tuple[Tuple[float, float, float], ...]
    max_range: float

    def __post_init__(self) -> None:
        if not self.breakpoints:
            raise BeliefMapError("sensor model needs at least one breakpoint")
        ranges = [b[0] for b in self.breakpoints]
        if ranges[0] != 0.0:
            raise BeliefMapError("first sensor breakpoint must be at range 0")
        if any(b >= a for a, b in zip(ranges[1:], ranges[:-1])):
            raise BeliefMapError("sensor breakpoint ranges must be strictly increasing")
        for _, tpr, tnr in self.breakpoints:
            if not (0.5 <= tpr <= 1.0 and 0.5 <= tnr <= 1.0):
                raise BeliefMapError("sensor rates must lie in [0.5, 1.0]")
        if self.max_range <= 0.0:
            raise BeliefMapError("max_range must be positive")
        object.__setattr__(self, "_ranges", np.asarray(ranges, dtype=float))
        object.__setattr__(
            self, "_tpr", np.asarray([b[1] for b in self.breakpoints], dtype=float)
        )
        object.__setattr__(
            self, "_tnr", np.asarray([b[2] for b in self.breakpoints], dtype=float)
        )

    @classmethod
    def default(cls) -> "SensorModel":
        """0.9 out to 200 m, falling linearly to 0.5 at 600 m."""
        return cls(
            breakpoints=((0.0, 0.9, 0.9), (200.0, 0.9, 0.9), (600.0, 0.5, 0.5)),
            max_range=600.0,
        )

    @classmethod
    def constant(cls, tpr: float, tnr: float, max_range: float) -> "SensorModel":
        """Range-independent rates out to ``max_range``."""
        return cls(breakpoints=((0.0, tpr, tnr),), max_range=max_range)

    def rates(self, range_m: float) -> Tuple[float, float]:
        """Scalar (tpr, tnr) at ``range_m``."""
        if range_m > self.max_range:
            return UNINFORMATIVE
        tpr = float(np.interp(range_m, self._ranges, self._tpr))  # type: ignore[attr-defined]
        tnr = float(np.interp(range_m, self._ranges, self._tnr))  # type: ignore[attr-defined]
        return tpr, tnr

    def rates_array(self, ranges: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Vectorized (tpr, tnr) for an array of ranges."""
        ranges = np.asarray(ranges, dtype=float)
        tpr = np.interp(ranges, self._ranges, self._tpr)  # type: ignore[attr-defined]
        tnr = np.interp(ranges, self._ranges, self._tnr)  # type: ignore[attr-defined]
        beyond = ranges > self.max_range
        tpr[beyond] = 0.5
        tnr[beyond] = 0.5
        return tpr, tnr


def entropy(p: float) -> float:
    """Shannon entropy of a binary cell in bits.

    Raises:
        BeliefMapError: If ``p`` lies outside [0, 1]
    """
    if not (0.0 <= p <= 1.0):
        raise BeliefMapError(f"probability {p} outside [0, 1]")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def entropy_array(p: np.ndarray) -> np.ndarray:
    """Elementwise binary entropy in bits, with 0·log 0 taken as 0."""
    p = np.asarray(p, dtype=float)
    q = 1.0 - p
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -(
            np.where(p > 0.0, p * np.log2(np.where(p > 0.0, p, 1.0)), 0.0)
            + np.where(q > 0.0, q * np.log2(np.where(q > 0.0, q, 1.0)), 0.0)
        )
    return h


def lookup_rates(model: SensorModel, range_m: float) -> Tuple[float, float]:
    """Detector rates at a viewing range."""
    return model.rates(range_m)


def _clamp(posterior: ArrayLike, prior: ArrayLike) -> ArrayLike:
    lo = np.minimum(prior, PROBABILITY_EPSILON)
    hi = np.maximum(prior, 1.0 - PROBABILITY_EPSILON)
    return np.clip(posterior, lo, hi)


def posterior(
    p: np.ndarray, positive: np.ndarray, tpr: np.ndarray, tnr: np.ndarray
) -> np.ndarray:
    """Vectorized Bayes update for binary detections.

    Cells whose denominator vanishes keep their prior. Results are clamped
    to ``[min(p, eps), max(p, 1 - eps)]`` so a certain cell stays certain
    and an uncertain one never becomes absorbing.
    """
    p = np.asarray(p, dtype=float)
    positive = np.asarray(positive, dtype=bool)
    like_occ = np.where(positive, tpr, 1.0 - tpr)
    like_free = np.where(positive, 1.0 - tnr, tnr)
    num = like_occ * p
    den = num + like_free * (1.0 - p)
    safe = den > 0.0
    out = np.where(safe, num / np.where(safe, den, 1.0), p)
    return np.asarray(_clamp(out, p), dtype=float)


def bayes_update(p: float, z: Measurement, model: SensorModel) -> float:
    """Posterior occupancy after one measurement.

    Raises:
        BeliefMapError: If ``p`` lies outside [0, 1]
    """
    if not (0.0 <= p <= 1.0):
        raise BeliefMapError(f"probability {p} outside [0, 1]")
    tpr, tnr = model.rates(z.range)
    if z.positive:
        num = tpr * p
        den = num + (1.0 - tnr) * (1.0 - p)
    else:
        num = (1.0 - tpr) * p
        den = num + tnr * (1.0 - p)
    if den <= 0.0:
        return p
    return float(_clamp(num / den, p))
