"""Maximum-profit routing with variable supply."""

from .instance import Instance, Site, distance, load_instance, supply_at, validate
from .pipeline import PipelineConfig, solve
from .solution import Route, Solution, Visit, check_feasibility, profit, route_cost

__all__ = [
    "Instance",
    "PipelineConfig",
    "Route",
    "Site",
    "Solution",
    "Visit",
    "check_feasibility",
    "distance",
    "load_instance",
    "profit",
    "route_cost",
    "solve",
    "supply_at",
    "validate",
]
