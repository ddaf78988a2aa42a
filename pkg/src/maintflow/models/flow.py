"""Flow-over-time variables and constraints shared by every formulation."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..core import Instance, Schedule
from ..milp.model import MilpModel
from ..timegrid import Discretization, OutageMap, check_grid, induced_grid


def xname(arc: str, i: int) -> str:
    return f"x[{arc},{i}]"


def sname(node: str, i: int) -> str:
    return f"xv[{node},{i}]"


@dataclass(frozen=True)
class FlowVars:
    n: int
    x: dict  # (arc, i) -> variable name, i = 1..n
    store: dict  # (v, i) -> variable name, i = 1..n-1 (levels at t_0 and t_n are zero)

    def level(self, v: str, i: int):
        return self.store.get((v, i))


def add_flow_block(m: MilpModel, inst: Instance, n: int, arc_ub=None) -> FlowVars:
    """Arc flows per interval, storage levels, conservation, and the throughput objective.

    ``arc_ub(arc, i)`` gives a constant upper bound for ``x[arc, i]`` or ``None``
    when the caller adds its own capacity constraint.
    """
    net = inst.network
    x, store = {}, {}
    for i in range(1, n + 1):
        for a in net.arcs:
            ub = arc_ub(a.id, i) if arc_ub else None
            x[a.id, i] = m.add_var(xname(a.id, i), lb=0, ub=ub, role="x", arc=a.id, interval=i)
    for v, u in net.storage.items():
        for i in range(1, n):
            store[v, i] = m.add_var(sname(v, i), lb=0, ub=u, role="xv", node=v, interval=i)
    for i in range(1, n + 1):
        for v in net.nodes:
            if v in (net.source, net.sink):
                continue
            coeffs: dict[str, Fraction] = {}
            for a in net.out_arcs(v):
                coeffs[x[a.id, i]] = coeffs.get(x[a.id, i], Fraction(0)) + 1
            for a in net.in_arcs(v):
                coeffs[x[a.id, i]] = coeffs.get(x[a.id, i], Fraction(0)) - 1
            if v in net.storage:
                if i < n:
                    coeffs[store[v, i]] = Fraction(1)
                if i > 1:
                    coeffs[store[v, i - 1]] = Fraction(-1)
            m.add_constraint(coeffs, "=", 0, name=f"flow[{v},{i}]")
    obj: dict[str, Fraction] = {}
    for i in range(1, n + 1):
        for a in net.out_arcs(net.source):
            obj[x[a.id, i]] = obj.get(x[a.id, i], Fraction(0)) + 1
        for a in net.in_arcs(net.source):
            obj[x[a.id, i]] = obj.get(x[a.id, i], Fraction(0)) - 1
    m.set_objective(obj, "max")
    return FlowVars(n, x, store)


def flow_lp(inst: Instance, grid: Discretization, outages: OutageMap) -> MilpModel:
    """The evaluation LP for a fixed grid and outage pattern."""
    check_grid(inst, grid)
    for arc, ivs in outages.items():
        if any(not 1 <= i <= grid.n for i in ivs):
            raise ValueError(f"outage intervals of arc {arc} lie outside 1..{grid.n}")
    shut = {(arc, i) for arc, ivs in outages.items() for i in ivs}
    net = inst.network

    def ub(arc, i):
        return Fraction(0) if (arc, i) in shut else grid.length(i) * net.arc(arc).cap

    m = MilpModel("flow")
    add_flow_block(m, inst, grid.n, ub)
    return m


def schedule_flow_lp(inst: Instance, sched: Schedule) -> MilpModel:
    grid, outages = induced_grid(inst, sched)
    return flow_lp(inst, grid, outages)
