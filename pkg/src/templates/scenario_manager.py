"""Scenario manager for named campaign presets."""

from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel

from ..geometry.bounds import Bounds
from ..models.bench import (
    CampaignConfig,
    EnvDistribution,
    EnvSpec,
    GaussianPrior,
    PriorityRegion,
)
from ..models.planning import DecayConfig, PlannerConfig


class ScenarioPreset(str, Enum):
    """Available scenario presets."""

    DESK = "desk"
    FULL = "full"
    PRIORITY_BASE = "priority-base"
    PRIORITY_WEIGHTED = "priority-weighted"
    PRIORITY_TIMED = "priority-timed"
    HORIZON_CLUSTERED = "horizon-clustered"
    HORIZON_DENSE = "horizon-dense"


class ScenarioTemplate(BaseModel):
    """Campaign settings for one named scenario."""

    name: str
    description: str
    campaign: CampaignConfig
    env: Optional[EnvSpec] = None
    recommended_settings: Dict[str, Any]


def _desk_campaign(**updates: Any) -> CampaignConfig:
    planner = PlannerConfig(
        extend_distance=300.0,
        near_radius=300.0,
        prune_radius=120.0,
        planning_time=1.0,
        budget=3000.0,
    )
    base = CampaignConfig(
        trials=30,
        budgets=[3000.0],
        width=1000.0,
        height=1000.0,
        cell_size=15.0,
        env=EnvDistribution(sigma_min=12.0, sigma_max=90.0),
        iterations=150,
        planner=planner,
    )
    return base.model_copy(update=updates)


def _demo_env(regions: Optional[List[PriorityRegion]] = None) -> EnvSpec:
    """Three clusters: one near the start, two far ones."""
    return EnvSpec(
        bounds=Bounds.from_size(1000.0, 1000.0),
        cell_size=15.0,
        priors=[
            GaussianPrior(x=500.0, y=300.0, sigma=60.0, peak=0.4),
            GaussianPrior(x=200.0, y=800.0, sigma=60.0, peak=0.4),
            GaussianPrior(x=800.0, y=800.0, sigma=60.0, peak=0.4),
        ],
        priority_regions=regions or [],
        seed=0,
    )


class ScenarioManager:
    """Manager for scenario presets."""

    def __init__(self) -> None:
        """Initialize scenario manager."""
        self._templates = self._initialize_templates()

    def _initialize_templates(self) -> Dict[str, ScenarioTemplate]:
        """Initialize built-in scenario templates."""
        desk = _desk_campaign()
        timed_planner = desk.planner.model_copy(
            update={"decay": DecayConfig(gamma=0.1, beta=-0.9 / 60.0)}
        )
        return {
            ScenarioPreset.DESK: ScenarioTemplate(
                name="Desk scale",
                description="1 km square, 15 m cells, 3 km budget; a fifth of the full scale",
                campaign=desk,
                recommended_settings={"trials": 30, "workers": 4, "iterations": 150},
            ),
            ScenarioPreset.FULL: ScenarioTemplate(
                name="Full scale",
                description="5 km square, 30 m cells, 15 km budget, 10 s planning cycles",
                campaign=CampaignConfig(trials=100, budgets=[15000.0], deterministic=False),
                recommended_settings={"trials": 100, "workers": 8, "planning_time": 10.0},
            ),
            ScenarioPreset.PRIORITY_BASE: ScenarioTemplate(
                name="Priority demo: uniform",
                description="Three clusters, uniform priority, no time decay",
                campaign=_desk_campaign(trials=1, scenario=ScenarioPreset.PRIORITY_BASE.value),
                env=_demo_env(),
                recommended_settings={"iterations": 400},
            ),
            ScenarioPreset.PRIORITY_WEIGHTED: ScenarioTemplate(
                name="Priority demo: weighted",
                description="The far right cluster carries five times the priority",
                campaign=_desk_campaign(trials=1, scenario=ScenarioPreset.PRIORITY_WEIGHTED.value),
                env=_demo_env(
                    [PriorityRegion(bounds=Bounds(x_min=650.0, y_min=650.0, x_max=950.0, y_max=950.0), weight=5.0)]
                ),
                recommended_settings={"iterations": 400},
            ),
            ScenarioPreset.PRIORITY_TIMED: ScenarioTemplate(
                name="Priority demo: time decay",
                description="Rewards decay to a tenth of their value within a minute",
                campaign=_desk_campaign(
                    trials=1, scenario=ScenarioPreset.PRIORITY_TIMED.value, planner=timed_planner
                ),
                env=_demo_env(),
                recommended_settings={"iterations": 400},
            ),
            ScenarioPreset.HORIZON_CLUSTERED: ScenarioTemplate(
                name="Horizon: clustered",
                description="Four tight clusters spread over the map",
                campaign=_desk_campaign(
                    scenario=ScenarioPreset.HORIZON_CLUSTERED.value,
                    env=EnvDistribution(
                        count_min=4, count_max=4, sigma_min=20.0, sigma_max=40.0, peak_min=0.4, peak_max=0.5
                    ),
                ),
                recommended_settings={"horizon_fraction": 1.0 / 3.0},
            ),
            ScenarioPreset.HORIZON_DENSE: ScenarioTemplate(
                name="Horizon: dense",
                description="Twenty wide clusters covering most of the map",
                campaign=_desk_campaign(
                    scenario=ScenarioPreset.HORIZON_DENSE.value,
                    env=EnvDistribution(
                        count_min=20, count_max=20, sigma_min=60.0, sigma_max=90.0
                    ),
                ),
                recommended_settings={"horizon_fraction": 1.0 / 3.0},
            ),
        }

    def get_template(self, preset: str) -> Optional[ScenarioTemplate]:
        """Get template by preset name.

        Args:
            preset: Preset name

        Returns:
            Scenario template or None if not found
        """
        try:
            return self._templates.get(ScenarioPreset(preset))
        except ValueError:
            return None

    def get_campaign(self, preset: str) -> CampaignConfig:
        """Campaign config of a preset.

        Raises:
            ValueError: If the preset is unknown
        """
        template = self.get_template(preset)
        if template is None:
            raise ValueError(f"Unknown scenario preset: {preset}")
        return template.campaign.model_copy(deep=True)

    def list_presets(self) -> List[str]:
        """Get list of available presets.

        Returns:
            List of preset names
        """
        return [preset.value for preset in ScenarioPreset]

    def describe(self) -> Dict[str, Dict[str, Any]]:
        return {
            preset.value: {
                "name": template.name,
                "description": template.description,
                "recommended_settings": template.recommended_settings,
            }
            for preset, template in self._templates.items()
        }
