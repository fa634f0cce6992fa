"""Rectangular search bounds."""

from typing import Tuple

import numpy as np
from pydantic import BaseModel, Field, model_validator


class Bounds(BaseModel):
    """Axis-aligned search rectangle in metres."""

    x_min: float = Field(..., description="Western edge (m)")
    y_min: float = Field(..., description="Southern edge (m)")
    x_max: float = Field(..., description="Eastern edge (m)")
    y_max: float = Field(..., description="Northern edge (m)")

    @model_validator(mode="after")
    def _check_extent(self) -> "Bounds":
        if self.x_max <= self.x_min or self.y_max <= self.y_min:
            raise ValueError("bounds must have positive width and height")
        return self

    @classmethod
    def from_size(
        cls, width: float, height: float, origin: Tuple[float, float] = (0.0, 0.0)
    ) -> "Bounds":
        return cls(
            x_min=origin[0],
            y_min=origin[1],
            x_max=origin[0] + width,
            y_max=origin[1] + height,
        )

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def center(self) -> Tuple[float, float]:
        return (0.5 * (self.x_min + self.x_max), 0.5 * (self.y_min + self.y_max))

    def contains(self, x: float, y: float, tol: float = 1e-6) -> bool:
        return (
            self.x_min - tol <= x <= self.x_max + tol
            and self.y_min - tol <= y <= self.y_max + tol
        )

    def contains_all(self, xs: np.ndarray, ys: np.ndarray, tol: float = 1e-6) -> bool:
        return bool(
            np.all(xs >= self.x_min - tol)
            and np.all(xs <= self.x_max + tol)
            and np.all(ys >= self.y_min - tol)
            and np.all(ys <= self.y_max + tol)
        )

    def expanded(self, margin: float) -> "Bounds":
        return Bounds(
            x_min=self.x_min - margin,
            y_min=self.y_min - margin,
            x_max=self.x_max + margin,
            y_max=self.y_max + margin,
        )
