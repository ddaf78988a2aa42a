"""One-call solves of the three formulations, returning bounds and schedules."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import Instance, InfeasibleScheduleError, Schedule, midpoint_schedule
from .milp import MilpResult, solve_milp
from .milp.model import OPTIMAL
from .models import (build_ctip, build_tdip, build_tdip_lb, ctip_rounding, ctip_start, extract_schedule,
                     tdip_start)
from .timegrid import Discretization, GridError


def _midpoint_start(build, *args, **kw):
    """Warm start from the midpoint schedule, or ``None`` when it does not fit the model."""
    try:
        return build(*args, midpoint_schedule(args[0]), **kw)
    except (InfeasibleScheduleError, GridError):
        return None


@dataclass
class BoundResult:
    """``value`` is the best feasible objective (a lower bound on the optimum for
    CTIP and the lower-bound model); ``bound`` is the proven bound of the model."""

    method: str
    status: str
    value: Fraction | None
    bound: Fraction | None
    lp_bound: Fraction | None
    schedule: Schedule | None
    nodes: int
    elapsed: float
    result: MilpResult

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def _wrap(method, res: MilpResult, schedule=None) -> BoundResult:
    return BoundResult(method, res.status, res.objective, res.bound, res.root_bound, schedule,
                       res.nodes, res.elapsed, res)


def solve_ctip(inst: Instance, time_limit: float | None = None, node_limit: int | None = None,
               warm: bool = True, heuristic: bool = True) -> BoundResult:
    """Continuous-time model from the midpoint schedule, with the rounding heuristic."""
    model = build_ctip(inst)
    start = _midpoint_start(ctip_start, inst) if warm else None
    res = solve_milp(model, time_limit=time_limit, node_limit=node_limit, start=start,
                     heuristic=ctip_rounding(inst) if heuristic else None)
    sched = extract_schedule(inst, model, res) if res.has_incumbent else None
    return _wrap("CTIP", res, sched)


def bound_ub(inst: Instance, grid: Discretization, time_limit: float | None = None,
             node_limit: int | None = None, warm: bool = True, label: str = "TDIP") -> BoundResult:
    """Upper-bound model on ``grid``; ``bound`` and ``lp_bound`` are upper bounds on the optimum."""
    model = build_tdip(inst, grid)
    start = _midpoint_start(tdip_start, inst, grid) if warm else None
    return _wrap(label, solve_milp(model, time_limit=time_limit, node_limit=node_limit, start=start))


def bound_lb(inst: Instance, grid: Discretization, time_limit: float | None = None,
             node_limit: int | None = None, warm: bool = True, label: str = "TDIP-LB") -> BoundResult:
    """Lower-bound model on a conformal ``grid``; ``value`` is achieved by ``schedule``."""
    model = build_tdip_lb(inst, grid)
    start = _midpoint_start(tdip_start, inst, grid, lower=True) if warm else None
    res = solve_milp(model, time_limit=time_limit, node_limit=node_limit, start=start)
    sched = extract_schedule(inst, model, res) if res.has_incumbent else None
    return _wrap(label, res, sched)
