"""Data models for the planning service and bench harness.

Submodules are imported directly (``src.models.planning`` and friends); the
belief document is the only model the core packages depend on.
"""

from .belief import BeliefMapDocument

__all__ = ["BeliefMapDocument"]
