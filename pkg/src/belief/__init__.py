"""Belief map, detector model and Bayesian primitives."""

from .grid import BeliefMap, total_entropy
from .sensor import (
    BeliefMapError,
    Measurement,
    SensorModel,
    bayes_update,
    entropy,
    entropy_array,
    lookup_rates,
    posterior,
)

__all__ = [
    "BeliefMap",
    "BeliefMapError",
    "Measurement",
    "SensorModel",
    "bayes_update",
    "entropy",
    "entropy_array",
    "lookup_rates",
    "posterior",
    "total_entropy",
]
