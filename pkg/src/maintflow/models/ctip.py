"""Continuous-time formulation: interval endpoints are decision variables."""
from __future__ import annotations

from fractions import Fraction

from ..core import Instance, Schedule, is_feasible, require_feasible
from ..milp.model import MilpModel
from ..evaluator import evaluate_schedule
from .flow import add_flow_block, sname, xname


def tname(i: int) -> str:
    return f"t[{i}]"


def wname(a: str, i: int) -> str:
    return f"w[{a},{i}]"


def zname(a: str, i: int) -> str:
    return f"z[{a},{i}]"


def dname(a: str, i: int) -> str:
    return f"D[{a},{i}]"


def dbname(a: str, i: int) -> str:
    return f"Db[{a},{i}]"


def build_ctip(inst: Instance) -> MilpModel:
    """Exact model: ``M = 2|A_1| + 1`` intervals whose endpoints ``t_i`` are variables.

    ``w[a,i] = 1`` when arc ``a`` is shut in interval ``i``; ``z[a,i] = 1`` when
    its job begins at ``t_{i-1}``.  ``D``/``Db`` split each interval length
    into shut and open parts so that duration and capacity stay linear.
    """
    jobs = inst.jobs
    M = 2 * len(jobs) + 1
    T = inst.horizon
    m = MilpModel("ctip")
    for i in range(M + 1):
        if i == 0:
            m.add_var(tname(i), lb=0, ub=0, role="t", interval=i)
        elif i == M:
            m.add_var(tname(i), lb=T, ub=T, role="t", interval=i)
        else:
            m.add_var(tname(i), lb=0, ub=T, role="t", interval=i)
    for j in jobs:
        for i in range(1, M + 1):
            m.add_binary(wname(j.arc, i), role="w", arc=j.arc, interval=i)
            m.add_binary(zname(j.arc, i), role="z", arc=j.arc, interval=i)
            m.add_var(dname(j.arc, i), lb=0, role="D", arc=j.arc, interval=i)
            m.add_var(dbname(j.arc, i), lb=0, role="Db", arc=j.arc, interval=i)
    job_arcs = {j.arc for j in jobs}
    flow = add_flow_block(m, inst, M)
    for i in range(1, M + 1):
        m.add_constraint({tname(i): 1, tname(i - 1): -1}, ">=", 0, name=f"order[{i}]")
    for j in jobs:
        a, r, d, p = j.arc, j.release, j.deadline, j.processing
        for i in range(1, M + 1):
            w = wname(a, i)
            m.add_constraint({tname(i - 1): 1, w: -r}, ">=", 0, name=f"release[{a},{i}]")
            m.add_constraint({tname(i): 1, w: T - d}, "<=", T, name=f"deadline[{a},{i}]")
            start = {zname(a, i): 1, w: -1}
            if i > 1:
                start[wname(a, i - 1)] = 1
            m.add_constraint(start, ">=", 0, name=f"onset[{a},{i}]")
            m.add_constraint({dname(a, i): 1, dbname(a, i): 1, tname(i): -1, tname(i - 1): 1}, "=", 0,
                             name=f"split[{a},{i}]")
            m.add_constraint({dname(a, i): 1, w: -p}, "<=", 0, name=f"shut[{a},{i}]")
            m.add_constraint({dbname(a, i): 1, w: T - p}, "<=", T - p, name=f"open[{a},{i}]")
            m.add_constraint({flow.x[a, i]: 1, dbname(a, i): -inst.network.arc(a).cap}, "<=", 0,
                             name=f"cap[{a},{i}]")
        m.add_constraint({zname(a, i): 1 for i in range(1, M + 1)}, "=", 1, name=f"once[{a}]")
        m.add_constraint({dname(a, i): 1 for i in range(1, M + 1)}, "=", p, name=f"duration[{a}]")
    for arc in inst.network.arcs:
        if arc.id in job_arcs:
            continue
        for i in range(1, M + 1):
            m.add_constraint({flow.x[arc.id, i]: 1, tname(i): -arc.cap, tname(i - 1): arc.cap}, "<=", 0,
                             name=f"cap[{arc.id},{i}]")
    for a, b in inst.simultaneous:
        for i in range(1, M + 1):
            m.add_constraint({wname(a, i): 1, wname(b, i): -1}, "=", 0, name=f"same[{a},{b},{i}]")
    m.meta.update(kind="ctip", M=M, flow=flow)
    return m


def ctip_assignment(inst: Instance, sched: Schedule) -> dict[str, Fraction]:
    """Breakpoints, shut pattern and start indicators that realize ``sched``.

    The sorted event times (with 0 and T, duplicates kept) fill ``t_0..t_M``;
    arc ``a`` is shut in interval ``i`` iff it lies inside ``[t*_a, t*_a + p_a]``.
    """
    require_feasible(inst, sched)
    M = 2 * len(inst.jobs) + 1
    pts = [Fraction(0), inst.horizon]
    for j in inst.jobs:
        pts += [sched[j.arc], sched[j.arc] + j.processing]
    pts.sort()
    out = {tname(i): pts[i] for i in range(M + 1)}
    for j in inst.jobs:
        lo, hi = sched[j.arc], sched[j.arc] + j.processing
        seen = False
        for i in range(1, M + 1):
            length = pts[i] - pts[i - 1]
            on = lo <= pts[i - 1] and pts[i] <= hi
            out[wname(j.arc, i)] = Fraction(int(on))
            out[zname(j.arc, i)] = Fraction(int(on and not seen))
            seen = seen or on
            out[dname(j.arc, i)] = length if on else Fraction(0)
            out[dbname(j.arc, i)] = Fraction(0) if on else length
    return out


def ctip_start(inst: Instance, sched: Schedule) -> dict[str, Fraction]:
    """Binaries and breakpoints of :func:`ctip_assignment`, for use as a warm start."""
    full = ctip_assignment(inst, sched)
    return {k: v for k, v in full.items() if k[0] in "twz"}


def ctip_full_assignment(inst: Instance, sched: Schedule) -> dict[str, Fraction]:
    """:func:`ctip_assignment` plus the flows and storage levels of a maximum flow."""
    return _full(inst, sched)[0]


def _full(inst: Instance, sched: Schedule):
    out = ctip_assignment(inst, sched)
    sol = evaluate_schedule(inst, sched)
    M = 2 * len(inst.jobs) + 1
    pts = [out[tname(i)] for i in range(M + 1)]
    at = {p: k for k, p in enumerate(sol.grid.points)}
    net = inst.network
    for i in range(1, M + 1):
        k = at[pts[i - 1]] + 1
        nonzero = pts[i] > pts[i - 1]
        for a in net.arcs:
            out[xname(a.id, i)] = sol.arc_flows.get((a.id, k), Fraction(0)) if nonzero else Fraction(0)
        if i < M:
            for v in net.storage:
                out[sname(v, i)] = sol.storage.get((v, at[pts[i]]), Fraction(0))
    return out, sol.value


def ctip_rounding(inst: Instance, rounds: int = 3):
    """Primal heuristic for :func:`build_ctip` models.

    Reads job starts off an LP solution (the breakpoint opening the interval
    with the largest start indicator, or the first interval at least half
    shut), clamps them into the job windows, then improves the better of the
    two by moving one job at a time to an LP breakpoint or to a time aligned
    with another job's start or end.  Schedules are evaluated exactly and the
    complete assignment of the best one is returned.
    """
    M = 2 * len(inst.jobs) + 1
    jobs = inst.jobs
    seen: dict = {}
    # jobs that must run together move as one; the first of a group leads
    leader = {j.arc: j.arc for j in jobs}
    for a, b in inst.simultaneous:
        leader[b] = leader[a]
    movers = [j for j in jobs if leader[j.arc] == j.arc]

    def tie(starts):
        return {a: starts[leader[a]] for a in starts}

    def value(starts):
        key = tuple(starts[j.arc] for j in jobs)
        if key not in seen:
            sched = Schedule(starts)
            seen[key] = evaluate_schedule(inst, sched).value if is_feasible(inst, sched) else None
        return seen[key]

    def better(v, w):
        return v is not None and (w is None or v > w)

    def clamp(j, x):
        return min(max(x, j.release), j.latest_start)

    def hook(values):
        t = [values[tname(i)] for i in range(M + 1)]
        seeds = []
        for rule in ("z", "w"):
            starts = {}
            for j in jobs:
                a = j.arc
                i = max(range(1, M + 1), key=lambda i: (values[zname(a, i)], -i))
                if rule == "w":
                    i = next((k for k in range(1, M + 1) if values[wname(a, k)] >= Fraction(1, 2)), i)
                starts[j.arc] = clamp(j, t[i - 1])
            seeds.append(tie(starts))
        best, best_val = None, None
        for starts in seeds:
            v = value(starts)
            if best is None or better(v, best_val):
                best, best_val = starts, v
        if best_val is None:
            return None
        for _ in range(rounds):
            improved = False
            for j in movers:
                cands = set(t)
                for o in jobs:
                    if o is not j:
                        so, eo = best[o.arc], best[o.arc] + o.processing
                        cands.update((so, eo, so - j.processing, eo - j.processing))
                for x in sorted({clamp(j, c) for c in cands}):
                    trial = dict(best)
                    trial[j.arc] = x
                    trial = tie(trial)
                    v = value(trial)
                    if better(v, best_val):
                        best, best_val, improved = trial, v, True
            if not improved:
                break
        return _full(inst, Schedule(best))[0]

    return hook
