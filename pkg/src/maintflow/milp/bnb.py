"""Best-bound branch-and-bound over binary variables."""
from __future__ import annotations

import heapq
import itertools
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from gmpy2 import mpq

from ..core import to_rational
from .model import (FEASIBLE_AT_LIMIT, INFEASIBLE, LIMIT_NO_INCUMBENT, OPTIMAL, UNBOUNDED, MilpModel,
                    MilpResult, ModelError, Snapshot)
from .simplex import LPRelaxation, Tableau, to_fraction, to_mpq

_HALF = mpq(1, 2)


class WarmStartError(ModelError):
    def __init__(self, violations: list[str]):
        super().__init__("infeasible start: " + "; ".join(violations))
        self.violations = violations


@dataclass
class WarmStart:
    assignment: dict
    value: Fraction


def warm_start(model: MilpModel, assignment: Mapping[str, object]) -> WarmStart:
    """Validate a start.  Binaries must all be given; missing continuous values are
    completed by the best LP solution with the given values fixed."""
    given = {k: to_rational(v) for k, v in assignment.items()}
    problems = [f"{k}: not a model variable" for k in given if k not in model.variables]
    for b in model.binaries():
        if b not in given:
            problems.append(f"{b}: binary without a value")
        elif given[b] not in (0, 1):
            problems.append(f"{b}: {given[b]} is not binary")
    if problems:
        raise WarmStartError(problems)
    if len(given) == len(model.variables):
        problems = model.check(given)
        if problems:
            raise WarmStartError(problems)
        return WarmStart(given, model.evaluate(given))
    for name, x in given.items():
        var = model.variables[name]
        if (var.lb is not None and x < var.lb) or (var.ub is not None and x > var.ub):
            problems.append(f"{name}: {x} outside [{var.lb}, {var.ub}]")
    for con in model.constraints:
        if all(v in given for v in con.coeffs) and con.violation(given):
            problems.append(f"{con.name}: {con.activity(given)} {con.sense} {con.rhs} violated")
    if problems:
        raise WarmStartError(problems)
    lp = LPRelaxation(model.fixed(given))
    status = lp.solve()
    if status != OPTIMAL:
        raise WarmStartError([f"no completion of the fixed values exists (LP {status})"])
    return WarmStart(lp.values(), lp.objective)


@dataclass
class _Node:
    tab: Tableau
    depth: int


def _pick_branch(tab: Tableau, binaries: list[int]):
    best, dist = None, None
    for j in binaries:
        x = tab.val[j]
        if x.denominator != 1:
            d = abs(x - _HALF)
            if dist is None or d < dist:
                best, dist = j, d
    return best


def solve_milp(model: MilpModel, time_limit: float | None = None, node_limit: int | None = None,
               snapshot_times: Iterable[float] = (), snapshot_nodes: Iterable[int] = (),
               start: Mapping[str, object] | None = None,
               heuristic: Callable[[dict], Mapping | None] | None = None) -> MilpResult:
    """Solve ``model`` to optimality or until a limit is reached.

    Node selection is best bound first (deeper nodes first among equal bounds),
    branching is on the most fractional binary with ties broken by variable
    order, and each child LP is re-solved by the dual simplex from its parent's
    tableau.  ``node_limit`` counts solved LPs, the root included.

    ``heuristic`` is called with the LP solution of every fractional node and
    may return a complete assignment; it becomes the incumbent only if it passes
    an exact feasibility check and improves on the current one.

    At every requested snapshot time (seconds) or node count the LP solution of
    the open node with the best bound and the incumbent are recorded.  Triggers
    still pending when the search ends fire at termination with no LP solution.
    """
    t0 = time.perf_counter()
    if time_limit is not None and time_limit <= 0:
        raise ValueError("time limit must be positive")
    if node_limit is not None and node_limit <= 0:
        raise ValueError("node limit must be positive")
    triggers = sorted([("time", float(x)) for x in snapshot_times] + [("nodes", int(x)) for x in snapshot_nodes],
                      key=lambda tr: (tr[0], tr[1]))
    pending_time = [x for kind, x in triggers if kind == "time"]
    pending_nodes = [x for kind, x in triggers if kind == "nodes"]

    lp = LPRelaxation(model)
    sign, const = lp.sign, model.constant
    names = lp.names
    binaries = [lp.index[b] for b in model.binaries()]

    def external(z) -> Fraction:
        return to_fraction(z) * sign + const

    def values(tab: Tableau) -> dict:
        return {v: to_fraction(tab.val[k]) for k, v in enumerate(names)}

    inc_z = None
    inc_values = None
    if start is not None:
        ws = warm_start(model, start)
        inc_values = ws.assignment
        inc_z = to_mpq((ws.value - const) * sign)

    status = lp.solve()
    nodes = 1
    snapshots: list[Snapshot] = []
    if status == UNBOUNDED:
        return MilpResult(UNBOUNDED, nodes=nodes, elapsed=time.perf_counter() - t0)
    if status == INFEASIBLE:
        return MilpResult(INFEASIBLE, nodes=nodes, elapsed=time.perf_counter() - t0)
    root = lp.tableau
    root_bound = external(root.z)
    root_values = values(root)

    heap: list = []
    seq = itertools.count()
    store: dict[int, _Node] = {}

    def offer(candidate: Mapping | None) -> None:
        nonlocal inc_z, inc_values
        if candidate is None:
            return
        cand = {k: to_rational(v) for k, v in candidate.items()}
        if model.check(cand):
            return
        z = to_mpq((model.evaluate(cand) - const) * sign)
        if inc_z is None or z > inc_z:
            inc_z, inc_values = z, cand

    def consider(tab: Tableau, depth: int) -> None:
        nonlocal inc_z, inc_values
        if inc_z is not None and tab.z <= inc_z:
            return
        if _pick_branch(tab, binaries) is None:
            inc_z, inc_values = tab.z, values(tab)
            return
        if heuristic is not None:
            offer(heuristic(values(tab)))
            if inc_z is not None and tab.z <= inc_z:
                return
        k = next(seq)
        store[k] = _Node(tab, depth)
        heapq.heappush(heap, (-tab.z, -depth, k))

    def best_open():
        while heap and inc_z is not None and -heap[0][0] <= inc_z:
            store.pop(heapq.heappop(heap)[2])
        return store[heap[0][2]] if heap else None

    def snapshot(kind: str, at, final: bool = False) -> None:
        node = None if final else best_open()
        bound = node.tab.z if node is not None else inc_z
        snapshots.append(Snapshot(
            kind, at, time.perf_counter() - t0, nodes,
            None if bound is None else external(bound),
            None if node is None else external(node.tab.z),
            None if node is None else values(node.tab),
            None if inc_z is None else external(inc_z),
            None if inc_values is None else dict(inc_values)))

    def fire(force: bool = False, final: bool = False) -> None:
        elapsed = time.perf_counter() - t0
        while pending_nodes and (force or nodes >= pending_nodes[0]):
            snapshot("nodes", pending_nodes.pop(0), final)
        while pending_time and (force or elapsed >= pending_time[0]):
            snapshot("time", pending_time.pop(0), final)

    consider(root, 0)
    limited = False
    while True:
        fire()
        node = best_open()
        if node is None:
            break
        if (node_limit is not None and nodes >= node_limit) or \
                (time_limit is not None and time.perf_counter() - t0 >= time_limit):
            limited = True
            break
        k = heapq.heappop(heap)[2]
        del store[k]
        j = _pick_branch(node.tab, binaries)
        for fix, tab in ((1, node.tab.copy()), (0, node.tab)):
            tab.iterations = 0
            tab.set_bounds(j, mpq(fix), mpq(fix))
            outcome = tab.dual(cutoff=inc_z)
            nodes += 1
            if outcome == OPTIMAL:
                consider(tab, node.depth + 1)
    elapsed = time.perf_counter() - t0
    if limited:
        top = best_open()
        bound_z = top.tab.z if top is not None else inc_z
        if inc_z is not None and bound_z is not None and inc_z > bound_z:
            bound_z = inc_z
        fire(force=True)
        status = FEASIBLE_AT_LIMIT if inc_values is not None else LIMIT_NO_INCUMBENT
    else:
        bound_z = inc_z
        status = OPTIMAL if inc_values is not None else INFEASIBLE
    fire(force=True, final=True)
    return MilpResult(
        status,
        None if inc_z is None else external(inc_z),
        inc_values,
        None if bound_z is None else external(bound_z),
        nodes, elapsed, snapshots, root_bound, root_values)
