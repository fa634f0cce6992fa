"""Serialized belief-map document."""

import math
from typing import List, Optional, Tuple

from pydantic import BaseModel, Field, model_validator


class BeliefMapDocument(BaseModel):
    """Structured text form of a belief map.

    Probabilities and priorities are stored row-major, so cell ``idx`` is
    ``row * n_cols + col`` with row 0 at ``origin[1]``.
    """

    origin: Tuple[float, float] = Field(
        default=(0.0, 0.0), description="Lower-left corner of the grid (m)"
    )
    cell_size: float = Field(..., gt=0, description="Edge length of a square cell (m)")
    n_rows: int = Field(..., ge=1, description="Number of rows (along y)")
    n_cols: int = Field(..., ge=1, description="Number of columns (along x)")
    prob: List[float] = Field(..., description="Row-major occupancy probabilities")
    priority: Optional[List[float]] = Field(
        default=None, description="Row-major priority weights, 1.0 when omitted"
    )

    @model_validator(mode="after")
    def _check_arrays(self) -> "BeliefMapDocument":
        n_cells = self.n_rows * self.n_cols
        if len(self.prob) != n_cells:
            raise ValueError(f"prob has {len(self.prob)} entries, expected {n_cells}")
        if any(not (0.0 <= p <= 1.0) or math.isnan(p) for p in self.prob):
            raise ValueError("probabilities must lie in [0, 1]")
        if self.priority is not None:
            if len(self.priority) != n_cells:
                raise ValueError(
                    f"priority has {len(self.priority)} entries, expected {n_cells}"
                )
            if any(w < 0.0 for w in self.priority):
                raise ValueError("priorities must be non-negative")
        return self
