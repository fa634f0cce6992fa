"""Planner factory for the tree planner and the baselines."""

from typing import Dict, List, Optional, Type

from ..config import Settings
from ..models.planning import PlannerConfig
from ..planners import (
    BasePlanner,
    CoveragePlanner,
    GreedyPlanner,
    InformativeTreePlanner,
    MctsPlanner,
    PlannerError,
    RandomPlanner,
)

PLANNERS: Dict[str, Type[BasePlanner]] = {
    cls.name: cls
    for cls in (InformativeTreePlanner, MctsPlanner, GreedyPlanner, RandomPlanner, CoveragePlanner)
}


def create_planner(name: str, config: Optional[PlannerConfig] = None) -> BasePlanner:
    """Instantiate a registered planner.

    Raises:
        PlannerError: If no planner is registered under ``name``
    """
    try:
        cls = PLANNERS[name]
    except KeyError:
        raise PlannerError(
            f"Planner '{name}' not available",
            name,
            "UNKNOWN_PLANNER",
            {"available": sorted(PLANNERS)},
        ) from None
    return cls(config)


class PlannerFactory:
    """Creates planners with defaults taken from the application settings."""

    def __init__(self, settings: Settings) -> None:
        """Initialize planner factory.

        Args:
            settings: Application settings
        """
        self.settings = settings
        self._planners = dict(PLANNERS)

    def get_planner(self, name: str, config: Optional[PlannerConfig] = None) -> BasePlanner:
        """Fresh planner instance by name.

        In the ``test`` environment planners default to a fixed iteration
        count so results do not depend on wall time.
        """
        config = config or PlannerConfig()
        if (
            config.iterations is None
            and self.settings.environment == "test"
            and self.settings.deterministic_iterations
        ):
            config = config.model_copy(
                update={"iterations": self.settings.deterministic_iterations}
            )
        return create_planner(name, config)

    def get_available_planners(self) -> List[str]:
        """Get list of registered planner names.

        Returns:
            List of planner names
        """
        return list(self._planners.keys())
