"""Scheduling arc maintenance in networks with flows over time.

All times, capacities and flow values are exact rationals
(:class:`fractions.Fraction`).
"""
from .core import (Arc, GeneratorParams, InfeasibleScheduleError, Instance, InstanceError, Job, Network,
                   Schedule, generate_instance, is_feasible, load_instance, load_schedule, midpoint_schedule,
                   save_instance, save_schedule)
from .evaluator import evaluate_schedule, evaluate_value, max_flow
from .timegrid import Discretization, GridError, grid_from_selector, unit_grid

__version__ = "0.1.0"

__all__ = [
    "Arc", "Discretization", "GeneratorParams", "GridError", "InfeasibleScheduleError", "Instance",
    "InstanceError", "Job", "Network", "Schedule", "evaluate_schedule", "evaluate_value", "generate_instance",
    "grid_from_selector", "is_feasible", "load_instance", "load_schedule", "max_flow", "midpoint_schedule",
    "save_instance", "save_schedule", "unit_grid",
]
