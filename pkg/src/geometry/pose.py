"""Vehicle pose in (x, y, z, heading)."""

import math
from dataclasses import dataclass


class GeometryError(ValueError):
    """Raised for poses or paths that violate geometric preconditions."""


def wrap_angle(angle: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    wrapped = math.remainder(angle, 2.0 * math.pi)
    if wrapped <= -math.pi:
        wrapped += 2.0 * math.pi
    return wrapped


@dataclass(frozen=True, slots=True)
class Pose:
    """Position in metres and heading in radians, counter-clockwise from +x."""

    x: float
    y: float
    z: float
    psi: float = 0.0

    def __post_init__(self) -> None:
        if self.z < 0.0:
            raise GeometryError(f"pose below ground (z={self.z})")
        object.__setattr__(self, "psi", wrap_angle(self.psi))

    def distance(self, other: "Pose") -> float:
        """Euclidean distance over (x, y, z)."""
        return math.sqrt(
            (self.x - other.x) ** 2 + (self.y - other.y) ** 2 + (self.z - other.z) ** 2
        )

    def planar_distance(self, other: "Pose") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def heading_error(self, other: "Pose") -> float:
        return abs(wrap_angle(self.psi - other.psi))

    def matches(
        self, other: "Pose", position_tol: float = 1.0, heading_tol: float = math.radians(5.0)
    ) -> bool:
        """True when both poses agree within the merge tolerances."""
        return self.distance(other) <= position_tol and self.heading_error(other) <= heading_tol
