"""Candidate start times, exhaustive solvers, and the job-shifting machinery.

Without storage an optimal schedule exists whose starts all lie in finite
candidate sets built from release dates, latest starts, and sums/differences
of processing times.  :func:`exact_search_no_storage` enumerates them.
:func:`grid_oracle` is an independent brute force over a uniform start grid
that also works with storage.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from .core import Instance, InstanceError, Schedule, require_feasible, to_rational
from .evaluator import evaluate_value, static_max_flow

DEFAULT_BUDGET = 10**6


class BudgetExceeded(ValueError):
    """An enumeration would visit more start tuples than allowed."""


CandidateSets = dict  # arc id -> sorted tuple of start times


def candidate_sets(inst: Instance, rounds: int | None = None) -> CandidateSets:
    """Start-time candidates per job.

    ``S_0(a) = {r_a, d_a - p_a}``; each round adds, for every other job ``a'``,
    the times ``t``, ``t + p_a'``, ``t - p_a`` and ``t + p_a' - p_a`` with ``t``
    in ``S_k(a')`` that fall in ``a``'s start window.  ``rounds`` defaults to
    one less than the number of jobs.
    """
    jobs = inst.jobs
    if rounds is None:
        rounds = max(len(jobs) - 1, 0)
    sets = {j.arc: {j.release, j.latest_start} for j in jobs}
    for _ in range(rounds):
        nxt = {}
        for j in jobs:
            lo, hi, p = j.release, j.latest_start, j.processing
            new = set(sets[j.arc])
            for o in jobs:
                if o is j:
                    continue
                for t in sets[o.arc]:
                    for x in (t, t + o.processing, t - p, t + o.processing - p):
                        if lo <= x <= hi:
                            new.add(x)
            nxt[j.arc] = new
        if nxt == sets:
            break
        sets = nxt
    return {a: tuple(sorted(s)) for a, s in sets.items()}


def _product_size(choices) -> int:
    size = 1
    for c in choices:
        size *= len(c)
    return size


class _Decomposed:
    """Schedule value as a sum of interval length times static max flow (no storage)."""

    def __init__(self, inst: Instance):
        self.inst = inst
        self.memo: dict[frozenset, Fraction] = {}

    def flow(self, closed: frozenset) -> Fraction:
        if closed not in self.memo:
            self.memo[closed] = static_max_flow(self.inst, closed)
        return self.memo[closed]

    def value(self, starts: tuple) -> Fraction:
        jobs = self.inst.jobs
        pts = {Fraction(0), self.inst.horizon}
        for j, t in zip(jobs, starts):
            pts.update((t, t + j.processing))
        pts = sorted(pts)
        total = Fraction(0)
        for lo, hi in zip(pts, pts[1:]):
            closed = frozenset(j.arc for j, t in zip(jobs, starts) if t <= lo and hi <= t + j.processing)
            total += (hi - lo) * self.flow(closed)
        return total


def _together(inst: Instance):
    """Index pairs of jobs that must start at the same time."""
    pos = {a: k for k, a in enumerate(inst.job_arcs)}
    return [(pos[a], pos[b]) for a, b in inst.simultaneous]


def _candidate_optima(inst: Instance, budget: int):
    if inst.has_storage:
        raise InstanceError("exact search requires an instance without storage")
    cands = candidate_sets(inst)
    choices = [cands[j.arc] for j in inst.jobs]
    size = _product_size(choices)
    if size > budget:
        raise BudgetExceeded(f"{size} candidate schedules exceed the budget of {budget}")
    dec = _Decomposed(inst)
    pairs = _together(inst)
    best, best_val = [], None
    for starts in itertools.product(*choices):
        if any(starts[i] != starts[k] for i, k in pairs):
            continue
        val = dec.value(starts)
        if best_val is None or val > best_val:
            best, best_val = [starts], val
        elif val == best_val:
            best.append(starts)
    if best_val is None:
        if inst.jobs:
            raise InstanceError("no candidate schedule starts simultaneous jobs together")
        best_val = inst.horizon * static_max_flow(inst)
    return best, best_val


def exact_search_no_storage(inst: Instance, budget: int = DEFAULT_BUDGET) -> tuple[Schedule, Fraction]:
    """Optimal schedule of a storage-free instance by enumerating the candidate product.

    Among optimal schedules the lexicographically smallest start vector (in
    job order) is returned.
    """
    best, val = _candidate_optima(inst, budget)
    return Schedule(dict(zip(inst.job_arcs, best[0] if best else ()))), val


def optimal_schedules(inst: Instance, budget: int = DEFAULT_BUDGET) -> tuple[list[Schedule], Fraction]:
    """Every optimal schedule whose starts lie in the candidate sets, in lexicographic order."""
    best, val = _candidate_optima(inst, budget)
    return [Schedule(dict(zip(inst.job_arcs, b))) for b in best] or [Schedule({})], val


def grid_starts(inst: Instance, step) -> dict[str, tuple[Fraction, ...]]:
    """Starts ``r_a + m * step`` inside each job's window."""
    step = to_rational(step)
    if step <= 0:
        raise ValueError("step must be positive")
    out = {}
    for j in inst.jobs:
        count = int((j.latest_start - j.release) / step)
        out[j.arc] = tuple(j.release + m * step for m in range(count + 1))
    return out


def grid_oracle(inst: Instance, step, budget: int = DEFAULT_BUDGET) -> tuple[Schedule, Fraction]:
    """Best schedule over a uniform start grid, by exact evaluation of every tuple.

    Works with storage; the result is always a lower bound on the optimum.
    Ties go to the lexicographically smallest start vector.
    """
    starts = grid_starts(inst, step)
    choices = [starts[j.arc] for j in inst.jobs]
    size = _product_size(choices)
    if size > budget:
        raise BudgetExceeded(f"{size} grid schedules exceed the budget of {budget}")
    arcs = inst.job_arcs
    pairs = _together(inst)
    best, best_val = None, None
    for combo in itertools.product(*choices):
        if any(combo[i] != combo[k] for i, k in pairs):
            continue
        sched = Schedule(dict(zip(arcs, combo)))
        val = evaluate_value(inst, sched)
        if best_val is None or val > best_val:
            best, best_val = sched, val
    if best is None:
        raise InstanceError("no grid schedule starts simultaneous jobs together")
    return best, best_val


@dataclass
class SolutionGraph:
    """Jobs joined when their start/completion times coincide."""

    vertices: tuple[str, ...]
    edges: frozenset = field(default_factory=frozenset)  # frozensets {a, a'}

    def neighbours(self, a: str) -> list[str]:
        return [b for b in self.vertices if frozenset((a, b)) in self.edges]

    def distance(self, a: str, b: str) -> float | int:
        if a == b:
            return 0
        seen, queue = {a: 0}, deque([a])
        while queue:
            u = queue.popleft()
            for w in self.neighbours(u):
                if w not in seen:
                    seen[w] = seen[u] + 1
                    if w == b:
                        return seen[w]
                    queue.append(w)
        return float("inf")

    def component(self, a: str) -> frozenset:
        return frozenset(b for b in self.vertices if self.distance(a, b) != float("inf"))

    def components(self) -> list[frozenset]:
        out, seen = [], set()
        for a in self.vertices:
            if a not in seen:
                comp = self.component(a)
                seen |= comp
                out.append(comp)
        return out


def solution_graph(inst: Instance, sched: Schedule) -> SolutionGraph:
    require_feasible(inst, sched)
    ends = {j.arc: {sched[j.arc], sched[j.arc] + j.processing} for j in inst.jobs}
    arcs = inst.job_arcs
    edges = frozenset(frozenset((a, b)) for a, b in itertools.combinations(arcs, 2) if ends[a] & ends[b])
    return SolutionGraph(tuple(arcs), edges)


def closure(inst: Instance, sched: Schedule, times) -> frozenset:
    """Start and completion times of every job with an endpoint in ``times``."""
    times = {to_rational(t) for t in times}
    out = set()
    for j in inst.jobs:
        s, e = sched[j.arc], sched[j.arc] + j.processing
        if s in times or e in times:
            out.update((s, e))
    return frozenset(out)


@dataclass(frozen=True)
class ClosedSet:
    """A closed set of breakpoints, the jobs it carries, and whether it can move."""

    times: frozenset
    indices: frozenset
    jobs: frozenset
    free: bool


def closure_and_freedom(inst: Instance, sched: Schedule) -> tuple[SolutionGraph, list[ClosedSet]]:
    """The solution graph and the minimal closed breakpoint sets, one per component.

    Every closed set is a union of these; a union is free iff each part is.
    A set is free when no job starting in it sits at its release date or
    latest start.
    """
    graph = solution_graph(inst, sched)
    pts = _breakpoints(inst, sched)
    index = {t: i for i, t in enumerate(pts)}
    out = []
    for comp in graph.components():
        times = set()
        for a in comp:
            j = inst.job(a)
            times.update((sched[a], sched[a] + j.processing))
        while True:
            grown = closure(inst, sched, times)
            if grown <= times:
                break
            times |= grown
        jobs = frozenset(j.arc for j in inst.jobs if sched[j.arc] in times)
        free = all(sched[a] not in (inst.job(a).release, inst.job(a).latest_start) for a in jobs)
        out.append(ClosedSet(frozenset(times), frozenset(index[t] for t in times), jobs, free))
    return graph, out


def _breakpoints(inst: Instance, sched: Schedule) -> list[Fraction]:
    pts = {Fraction(0), inst.horizon}
    for j in inst.jobs:
        pts.update((sched[j.arc], sched[j.arc] + j.processing))
    return sorted(pts)


def union(sets) -> ClosedSet:
    sets = list(sets)
    return ClosedSet(frozenset().union(*(s.times for s in sets)),
                     frozenset().union(*(s.indices for s in sets)),
                     frozenset().union(*(s.jobs for s in sets)),
                     all(s.free for s in sets))


def shift_bound(inst: Instance, sched: Schedule, closed: ClosedSet) -> Fraction:
    """Largest ``eps`` for which shifting ``closed`` by ``+-eps`` keeps both the
    breakpoint order and every job window."""
    pts = _breakpoints(inst, sched)
    idx = closed.indices
    gaps = []
    for i in idx:
        if i - 1 >= 0 and i - 1 not in idx:
            gaps.append(pts[i] - pts[i - 1])
        if i + 1 < len(pts) and i + 1 not in idx:
            gaps.append(pts[i + 1] - pts[i])
    for a in closed.jobs:
        j = inst.job(a)
        gaps += [sched[a] - j.release, j.latest_start - sched[a]]
    return min(gaps) if gaps else Fraction(0)


def shift_schedule(inst: Instance, sched: Schedule, jobs, eps, closed: ClosedSet | None = None) -> Schedule:
    """Move the starts of ``jobs`` by ``eps``.

    When ``closed`` is given, ``|eps|`` must not exceed :func:`shift_bound`
    for it; in any case every shifted job must stay in its window.
    """
    eps = to_rational(eps)
    jobs = set(jobs)
    unknown = jobs - set(inst.job_arcs)
    if unknown:
        raise InstanceError(f"unknown jobs {sorted(unknown)}")
    if closed is not None and abs(eps) > shift_bound(inst, sched, closed):
        raise ValueError(f"shift {eps} exceeds the admissible bound {shift_bound(inst, sched, closed)}")
    starts = dict(sched.starts)
    for a in jobs:
        j = inst.job(a)
        t = starts[a] + eps
        if not j.release <= t <= j.latest_start:
            raise ValueError(f"shifting job {a} to {t} leaves its window [{j.release}, {j.latest_start}]")
        starts[a] = t
    return Schedule(starts)
