"""Named scenario presets for the planner bench."""

from .scenario_manager import ScenarioManager, ScenarioPreset, ScenarioTemplate

__all__ = [
    "ScenarioManager",
    "ScenarioPreset",
    "ScenarioTemplate",
]
