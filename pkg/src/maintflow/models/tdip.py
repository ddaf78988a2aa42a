"""Fixed-grid formulations: the upper-bound model and its conformal lower-bound variant."""
from __future__ import annotations

from fractions import Fraction

from ..core import Instance, Schedule, require_feasible
from ..milp.model import BINARY, CONTINUOUS, MilpModel
from ..timegrid import Discretization, GridError, is_conformal
from .flow import add_flow_block
from .sets import IntervalSets, interval_sets


def yname(a: str, i: int) -> str:
    return f"y[{a},{i}]"


def zname(a: str, i: int) -> str:
    return f"z[{a},{i}]"


def _build(inst: Instance, grid: Discretization, sets: IntervalSets, lower: bool) -> MilpModel:
    m = MilpModel("tdip_lb" if lower else "tdip")
    net = inst.network
    t = grid.points
    touch = {(a, i) for a, ivs in sets.T.items() for i in ivs}

    def arc_ub(arc, i):
        if (arc, i) in touch:
            return None  # linked to z below
        return grid.length(i) * net.arc(arc).cap

    flow = add_flow_block(m, inst, grid.n, arc_ub)
    for job in inst.jobs:
        a, r, d, p = job.arc, job.release, job.deadline, job.processing
        for i in sets.S[a]:
            m.add_binary(yname(a, i), role="y", arc=a, interval=i)
        for i in sets.T[a]:
            length = grid.length(i)
            # the per-interval processing cap is kept as a bound on z
            cap = (min(t[i], d) - max(t[i - 1], r)) / length
            m.add_var(zname(a, i), BINARY if lower else CONTINUOUS, lb=0, ub=min(Fraction(1), cap),
                      role="z", arc=a, interval=i)
            if lower and cap < 1:
                m.set_bounds(zname(a, i), 0, 0)
        m.add_constraint({yname(a, i): 1 for i in sets.S[a]}, "=", 1, name=f"starts[{a}]")
        m.add_constraint({zname(a, i): grid.length(i) for i in sets.T[a]}, "=", p, name=f"processing[{a}]")
        for i in sets.S[a]:
            coeffs = {zname(a, k): grid.length(k) for k in sets.Q[a, i]}
            coeffs[yname(a, i)] = -p
            m.add_constraint(coeffs, ">=", 0, name=f"complete[{a},{i}]")
        for i in sets.T[a]:
            z = zname(a, i)
            if lower:
                link = {yname(a, k): -1 for k in sets.P[a, i]}
                link[z] = 1
                m.add_constraint(link, "=", 0, name=f"link[{a},{i}]")
            else:
                length = grid.length(i)
                up = {yname(a, k): -sets.mu_plus[a, k, i] for k in sets.P[a, i]}
                up[z] = length
                m.add_constraint(up, "<=", 0, name=f"zup[{a},{i}]")
                lo = {yname(a, k): -sets.mu_minus[a, k, i] for k in sets.P[a, i] if sets.mu_minus[a, k, i]}
                lo[z] = length
                m.add_constraint(lo, ">=", 0, name=f"zlo[{a},{i}]")
            cap = grid.length(i) * net.arc(a).cap
            m.add_constraint({flow.x[a, i]: 1, z: cap}, "<=", cap, name=f"cap[{a},{i}]")
    for a, b in inst.simultaneous:
        for i in sets.T[a]:
            m.add_constraint({zname(a, i): 1, zname(b, i): -1}, "=", 0, name=f"same[{a},{b},{i}]")
    m.meta.update(kind="tdip_lb" if lower else "tdip", grid=grid, sets=sets, flow=flow)
    return m


def build_tdip(inst: Instance, grid: Discretization) -> MilpModel:
    """Upper-bound model on any grid; ``y`` binary start-interval indicators, ``z`` in [0, 1]."""
    return _build(inst, grid, interval_sets(inst, grid), lower=False)


def build_tdip_lb(inst: Instance, grid: Discretization) -> MilpModel:
    """Lower-bound model: binary ``z``, starts restricted to breakpoints of a conformal grid."""
    if not is_conformal(inst, grid):
        raise GridError("the lower-bound model needs a conformal discretization")
    return _build(inst, grid, interval_sets(inst, grid, lower=True), lower=True)


def tdip_start(inst: Instance, grid: Discretization, sched: Schedule, lower: bool = False) -> dict[str, Fraction]:
    """``y`` values encoding ``sched``: the interval containing each start, or, for the
    lower-bound model, the interval beginning exactly at it."""
    require_feasible(inst, sched)
    sets = interval_sets(inst, grid, lower)
    out = {}
    for job in inst.jobs:
        a = job.arc
        ts = sched[a]
        if lower:
            try:
                k = grid.index_of(ts) + 1
            except KeyError:
                raise GridError(f"start {ts} of job {a} is not a breakpoint") from None
        else:
            k = grid.containing(ts)
        if k not in sets.S[a]:
            raise GridError(f"start {ts} of job {a} falls in interval {k}, not a start interval")
        for i in sets.S[a]:
            out[yname(a, i)] = Fraction(int(i == k))
        if lower:
            for i in sets.T[a]:
                out[zname(a, i)] = Fraction(int(any(out[yname(a, k2)] for k2 in sets.P[a, i])))
    return out
