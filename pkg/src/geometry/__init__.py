"""Poses, curvature-bounded paths and sensor footprints."""

from .bounds import Bounds
from .footprint import (
    CameraModel,
    Footprint,
    edge_footprint,
    merge_footprints,
    observe_states,
    project_footprint,
)
from .paths import (
    DUBINS_WORDS,
    EdgeGeometry,
    Segment,
    arc,
    dubins_path,
    dubins_path_inside,
    dubins_words,
    steer,
    word_geometry,
)
from .pose import GeometryError, Pose, wrap_angle

__all__ = [
    "Bounds",
    "CameraModel",
    "DUBINS_WORDS",
    "EdgeGeometry",
    "Footprint",
    "GeometryError",
    "Pose",
    "Segment",
    "arc",
    "dubins_path",
    "dubins_path_inside",
    "dubins_words",
    "edge_footprint",
    "merge_footprints",
    "observe_states",
    "project_footprint",
    "steer",
    "word_geometry",
    "wrap_angle",
]
