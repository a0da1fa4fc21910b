"""Anytime multi-resolution, multi-heuristic best-first search toolkit."""

from .domain import DomainModel, HeuristicSpec, ProblemInstance, SingleResolutionView
from .search import (
    IterationStats,
    Planner,
    PlannerConfig,
    PlanResult,
    Preset,
    SolutionRecord,
    format_solution,
    preset,
    update_weights,
)

__all__ = [
    "DomainModel",
    "HeuristicSpec",
    "ProblemInstance",
    "SingleResolutionView",
    "IterationStats",
    "Planner",
    "PlannerConfig",
    "PlanResult",
    "Preset",
    "SolutionRecord",
    "format_solution",
    "preset",
    "update_weights",
]

__version__ = "0.1.0"
