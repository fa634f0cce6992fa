"""Request and response models of the planning service."""

from typing import Dict, List, Optional

from pydantic import BaseModel, Field

from .belief import BeliefMapDocument
from .bench import EnvDistribution, EnvSpec
from .planning import PlanRequestDocument


class PlanServiceRequest(BaseModel):
    """Plan request for a named planner."""

    planner: str = Field(default="tree", description="Registered planner name")
    request: PlanRequestDocument


class EnvironmentRequest(BaseModel):
    """Seeded random environment."""

    width: float = Field(default=1000.0, gt=0.0, description="Map width (m)")
    height: float = Field(default=1000.0, gt=0.0, description="Map height (m)")
    cell_size: float = Field(default=15.0, gt=0.0, description="Grid resolution (m)")
    seed: int = 0
    count: Optional[int] = Field(default=None, ge=0, description="Force the number of clusters")
    distribution: EnvDistribution = Field(
        default_factory=lambda: EnvDistribution(sigma_min=12.0, sigma_max=90.0)
    )


class EnvironmentResponse(BaseModel):
    spec: EnvSpec
    belief: BeliefMapDocument


class PlannersResponse(BaseModel):
    planners: List[str]


class ScenariosResponse(BaseModel):
    scenarios: Dict[str, Dict]
