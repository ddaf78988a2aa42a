"""Repair heuristics turning fractional processing intensities into schedules.

Both heuristics take a :class:`~maintflow.models.ZVector` (the share of each
interval during which a job is processed) and return a feasible schedule.
``Projection`` picks per job the start whose induced intensities are closest
in l1 distance; ``Centre-of-Mass`` centres the job on the median of its mass.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .core import Instance, Schedule, is_feasible, midpoint_schedule, require_feasible
from .evaluator import evaluate_value, static_max_flow
from .milp import solve_milp
from .models import ZVector, build_tdip, extract_zvector, interval_sets, tdip_start
from .timegrid import Discretization, check_grid


class HeuristicError(ValueError):
    pass


def _overlap(grid: Discretization, i: int, t: Fraction, p: Fraction) -> Fraction:
    lo, hi = grid.points[i - 1], grid.points[i]
    if t < hi and t + p > lo:
        return min(hi, t + p) - max(t, lo)
    return Fraction(0)


def induced_xi(inst: Instance, grid: Discretization, sched: Schedule) -> ZVector:
    """Share of every interval during which each job of ``sched`` is processed."""
    require_feasible(inst, sched)
    check_grid(inst, grid)
    sets = interval_sets(inst, grid)
    values = {}
    for j in inst.jobs:
        t = sched[j.arc]
        values[j.arc] = {i: _overlap(grid, i, t, j.processing) / grid.length(i) for i in sets.T[j.arc]}
    return ZVector(grid, values)


def projection_distance(grid: Discretization, touch, z_row: dict, t: Fraction, p: Fraction) -> Fraction:
    """l1 distance between the processing a start at ``t`` puts in each interval and ``z``."""
    return sum((abs(grid.length(i) * z_row.get(i, 0) - _overlap(grid, i, t, p)) for i in touch), Fraction(0))


def projection_candidates(inst: Instance, grid: Discretization, z: ZVector, arc: str) -> list[Fraction]:
    """Per (start interval, end interval) pair, the start best matching ``z`` in
    those two intervals; plus the two window ends."""
    sets = interval_sets(inst, grid)
    j = inst.job(arc)
    r, last, p = j.release, j.latest_start, j.processing
    t = grid.points
    row = z.values.get(arc, {})
    out = {r, last}
    for i in sets.S[arc]:
        for k in sets.E[arc, i]:
            if k == i:
                # starts and ends inside one interval: every such start looks alike there
                lo = max(t[i - 1], r)
                if lo <= min(t[i] - p, last):
                    out.add(lo)
                continue
            if k < i:
                continue
            L = p - (t[k - 1] - t[i])
            A = grid.length(i) * row.get(i, 0)
            B = grid.length(k) * row.get(k, 0)
            lo = max(Fraction(0), L - grid.length(k), t[i] - last)
            hi = min(grid.length(i), L, t[i] - r)
            if lo > hi:
                continue
            # largest alpha (earliest start) among the minimizers of |alpha-A| + |L-alpha-B|
            alpha = min(max(max(A, L - B), lo), hi)
            out.add(t[i] - alpha)
    return sorted(out)


def projection_heuristic(inst: Instance, grid: Discretization, z: ZVector) -> Schedule:
    """Start of each job minimizing the l1 distance to ``z``; earliest start on ties."""
    sets = interval_sets(inst, grid)
    starts = {}
    for j in inst.jobs:
        row = z.values.get(j.arc, {})
        best, best_f = None, None
        for t in projection_candidates(inst, grid, z, j.arc):
            f = projection_distance(grid, sets.T[j.arc], row, t, j.processing)
            if best_f is None or f < best_f:
                best, best_f = t, f
        starts[j.arc] = best
    return Schedule(starts)


def centre_of_mass(grid: Discretization, touch, z_row: dict, p: Fraction) -> Fraction:
    """Point splitting the job's mass (rescaled to ``p``) into equal halves."""
    masses = [(i, grid.length(i) * z_row.get(i, 0)) for i in sorted(touch)]
    total = sum((m for _, m in masses), Fraction(0))
    if total <= 0:
        raise HeuristicError("job has no processing mass")
    scale = p / total
    half = p / 2
    cum = Fraction(0)
    for i, m in masses:
        m *= scale
        if cum + m > half:
            density = m / grid.length(i)
            return grid.points[i - 1] + (half - cum) / density
        cum += m
    raise AssertionError("mass never exceeds half of the processing time")


def com_heuristic(inst: Instance, grid: Discretization, z: ZVector) -> Schedule:
    """Start each job half a processing time before its centre of mass, clamped into its window."""
    sets = interval_sets(inst, grid)
    starts = {}
    for j in inst.jobs:
        try:
            mid = centre_of_mass(grid, sets.T[j.arc], z.values.get(j.arc, {}), j.processing)
        except HeuristicError:
            raise HeuristicError(f"job {j.arc} has no processing mass") from None
        starts[j.arc] = min(max(mid - j.processing / 2, j.release), j.latest_start)
    return Schedule(starts)


HEURISTICS = {"CoM": com_heuristic, "Proj": projection_heuristic}
SOURCES = (("", "LP-root"), ("-LP", "LP-snapshot"), ("-FS", "incumbent"))


@dataclass
class HeuristicRun:
    label: str
    source: str
    z: ZVector | None
    schedule: Schedule
    value: Fraction

    def to_dict(self) -> dict:
        from .core import format_rational, schedule_to_dict

        return {"label": self.label, "source": self.source,
                "schedule": schedule_to_dict(self.schedule), "value": format_rational(self.value)}


@dataclass
class PipelineReport:
    runs: list[HeuristicRun]
    best: HeuristicRun
    missing: dict = field(default_factory=dict)  # source -> reason
    lp_bound: Fraction | None = None
    upper_bound: Fraction | None = None
    milp_status: str | None = None


def heuristic_pipeline(inst: Instance, grid: Discretization, tau_nodes: int | None = None,
                       tau_seconds: float | None = None, warm: bool = True) -> PipelineReport:
    """Run both heuristics on three z vectors taken from the fixed-grid upper-bound model.

    The model is solved until ``tau_nodes`` LPs or ``tau_seconds`` seconds
    (exactly one must be given), from the midpoint schedule when ``warm``.
    Sources: the root LP, the LP at the best open node when the limit hits,
    and the best feasible solution found by then.  Labels follow the ``CoM``,
    ``Proj``, ``CoM-LPτ``, ``Proj-FSτ`` pattern; the last run, ``MaxOfAll``,
    is the best of them.
    """
    if (tau_nodes is None) == (tau_seconds is None):
        raise ValueError("give exactly one of tau_nodes and tau_seconds")
    if not inst.jobs:
        sched = Schedule({})
        run = HeuristicRun("MaxOfAll", "direct", None, sched, inst.horizon * static_max_flow(inst))
        return PipelineReport([run], run, upper_bound=run.value, lp_bound=run.value, milp_status="optimal")
    tau = tau_nodes if tau_nodes is not None else tau_seconds
    model = build_tdip(inst, grid)
    start = tdip_start(inst, grid, midpoint_schedule(inst)) if warm else None
    res = solve_milp(model, node_limit=tau_nodes, time_limit=tau_seconds, start=start,
                     snapshot_nodes=[tau_nodes] if tau_nodes is not None else [],
                     snapshot_times=[tau_seconds] if tau_seconds is not None else [])
    snap = res.snapshots[0] if res.snapshots else None
    inputs = {
        "LP-root": res.root_assignment,
        "LP-snapshot": snap.lp_assignment if snap else None,
        "incumbent": res.assignment,
    }
    missing = {}
    runs = []
    for suffix, source in SOURCES:
        values = inputs[source]
        if values is None:
            missing[source] = "search finished before the snapshot" if source == "LP-snapshot" else "no solution"
            continue
        z = extract_zvector(inst, model, values)
        for name, fn in HEURISTICS.items():
            label = f"{name}{suffix}" + (f"τ={tau}" if suffix else "")
            try:
                sched = fn(inst, grid, z)
            except HeuristicError as exc:
                missing[f"{label}"] = str(exc)
                continue
            if not is_feasible(inst, sched):
                raise AssertionError(f"{label} produced an infeasible schedule")
            runs.append(HeuristicRun(label, source if not suffix else f"{source}-τ", z, sched,
                                     evaluate_value(inst, sched)))
    if not runs:
        sched = midpoint_schedule(inst)
        runs.append(HeuristicRun("midpoint", "direct", None, sched, evaluate_value(inst, sched)))
    top = max(runs, key=lambda r: r.value)
    best = HeuristicRun("MaxOfAll", top.label, top.z, top.schedule, top.value)
    return PipelineReport(runs + [best], best, missing, res.root_bound, res.bound, res.status)
