"""Environment, campaign and sweep configuration models."""

import itertools
from typing import List, Optional, Tuple

from pydantic import BaseModel, Field, model_validator

from ..geometry.bounds import Bounds
from .mission import SimConfig
from .planning import PlannerConfig

ALL_PLANNERS = ["tree", "mcts", "greedy", "random", "coverage"]
DETERMINISTIC_ITERATIONS = 200


class GaussianPrior(BaseModel):
    x: float
    y: float
    sigma: float = Field(..., gt=0.0, description="Standard deviation (m)")
    peak: float = Field(..., gt=0.0, lt=1.0, description="Probability at the center")


class PriorityRegion(BaseModel):
    """Rectangle whose cells get a priority weight."""

    bounds: Bounds
    weight: float = Field(..., ge=0.0)


class EnvDistribution(BaseModel):
    """Ranges random environments are drawn from."""

    count_min: int = Field(default=4, ge=0)
    count_max: int = Field(default=20, ge=0)
    sigma_min: float = Field(default=60.0, gt=0.0)
    sigma_max: float = Field(default=450.0, gt=0.0)
    peak_min: float = Field(default=0.05, gt=0.0, lt=1.0)
    peak_max: float = Field(default=0.5, gt=0.0, lt=1.0)

    @model_validator(mode="after")
    def _ordered(self) -> "EnvDistribution":
        if self.count_min > self.count_max:
            raise ValueError("count_min must not exceed count_max")
        if self.sigma_min > self.sigma_max:
            raise ValueError("sigma_min must not exceed sigma_max")
        if self.peak_min > self.peak_max:
            raise ValueError("peak_min must not exceed peak_max")
        return self

    def scaled(self, factor: float) -> "EnvDistribution":
        return self.model_copy(
            update={"sigma_min": self.sigma_min * factor, "sigma_max": self.sigma_max * factor}
        )


class EnvSpec(BaseModel):
    """A concrete environment: search rectangle plus Gaussian priors."""

    bounds: Bounds
    cell_size: float = Field(..., gt=0.0)
    priors: List[GaussianPrior] = Field(default_factory=list)
    priority_regions: List[PriorityRegion] = Field(default_factory=list)
    prob_cap: float = Field(default=0.5, gt=0.0, le=1.0)
    seed: Optional[int] = None

    @model_validator(mode="after")
    def _centers_in_bounds(self) -> "EnvSpec":
        for prior in self.priors:
            if not self.bounds.contains(prior.x, prior.y):
                raise ValueError(f"prior center ({prior.x}, {prior.y}) outside bounds")
        return self


class CampaignConfig(BaseModel):
    """Everything a Monte Carlo campaign needs; one JSON file of this drives the CLI."""

    planners: List[str] = Field(default_factory=lambda: list(ALL_PLANNERS), min_length=1)
    trials: int = Field(default=10, ge=1)
    budgets: List[float] = Field(default_factory=lambda: [15000.0], min_length=1)
    planning_time: Optional[float] = Field(default=None, ge=0.0, description="Overrides planner T")
    iterations: Optional[int] = Field(
        default=None, ge=0, description="Planner iterations per cycle in deterministic mode"
    )
    width: float = Field(default=5000.0, gt=0.0)
    height: float = Field(default=5000.0, gt=0.0)
    cell_size: float = Field(default=30.0, gt=0.0)
    env: EnvDistribution = Field(default_factory=EnvDistribution)
    scale: float = Field(default=1.0, gt=0.0, description="Multiplies map size, budgets and planner lengths")
    output_dir: str = "results"
    seed: int = 0
    workers: int = Field(default=1, ge=1)
    deterministic: bool = True
    scenario: Optional[str] = None
    planner: PlannerConfig = Field(default_factory=PlannerConfig)
    sim: SimConfig = Field(default_factory=SimConfig)

    def effective(self) -> "CampaignConfig":
        """Copy with ``scale`` folded into lengths and the overrides applied."""
        planner = self.planner.scaled(self.scale) if self.scale != 1.0 else self.planner
        updates: dict = {}
        if self.planning_time is not None:
            updates["planning_time"] = self.planning_time
        if not self.deterministic:
            updates["iterations"] = None
        elif self.iterations is not None:
            updates["iterations"] = self.iterations
        elif planner.iterations is None:
            updates["iterations"] = DETERMINISTIC_ITERATIONS
        if updates:
            planner = planner.model_copy(update=updates)
        sim = self.sim.model_copy(
            update={"deterministic": self.deterministic, "speed": planner.speed}
        )
        return self.model_copy(
            update={
                "width": self.width * self.scale,
                "height": self.height * self.scale,
                "budgets": [b * self.scale for b in self.budgets],
                "env": self.env.scaled(self.scale),
                "scale": 1.0,
                "planner": planner,
                "sim": sim,
            }
        )


class SweepConfig(BaseModel):
    """Grid over extend distance, near radius and prune radius."""

    extend_distances: List[float] = Field(default_factory=lambda: [1500.0], min_length=1)
    near_radii: List[float] = Field(default_factory=lambda: [1500.0], min_length=1)
    prune_radii: List[float] = Field(default_factory=lambda: [600.0], min_length=1)
    envs: int = Field(default=25, ge=1)
    campaign: CampaignConfig = Field(default_factory=CampaignConfig)

    def grid(self) -> List[Tuple[float, float, float]]:
        """(Δ, R, prune) points in flown metres; the campaign scale applies."""
        s = self.campaign.scale
        return [
            (extend * s, near * s, prune * s)
            for extend, near, prune in itertools.product(
                self.extend_distances, self.near_radii, self.prune_radii
            )
        ]
