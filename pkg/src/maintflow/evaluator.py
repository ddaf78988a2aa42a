"""Exact evaluation of a schedule as a maximum flow in a time-expanded network."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Hashable, Iterable, Sequence

from .core import Instance, Schedule, format_rational, require_feasible
from .timegrid import Discretization, OutageMap, check_grid, induced_grid

SUPER_SOURCE = ("<super-source>",)
SUPER_SINK = ("<super-sink>",)


@dataclass
class MaxFlowResult:
    value: Fraction
    flows: list[Fraction]
    source_side: frozenset
    cut_capacity: Fraction


def max_flow(edges: Sequence[tuple[Hashable, Hashable, Fraction]], source: Hashable, sink: Hashable) -> MaxFlowResult:
    """Maximum ``source``-``sink`` flow with a minimum cut certificate.

    Capacities are scaled to integers by the lcm of their denominators and the
    flow is found with Dinic's algorithm, so the value is exact.
    """
    if source == sink:
        raise ValueError("source and sink must differ")
    caps = [Fraction(c) for _, _, c in edges]
    if any(c < 0 for c in caps):
        raise ValueError("capacities must be nonnegative")
    scale = lcm(1, *(c.denominator for c in caps))
    index: dict[Hashable, int] = {source: 0, sink: 1}
    for u, v, _ in edges:
        index.setdefault(u, len(index))
        index.setdefault(v, len(index))
    n = len(index)
    head: list[int] = []
    cap: list[int] = []
    adj: list[list[int]] = [[] for _ in range(n)]
    for (u, v, _), c in zip(edges, caps):
        iu, iv = index[u], index[v]
        adj[iu].append(len(head))
        head.append(iv)
        cap.append(int(c * scale))
        adj[iv].append(len(head))
        head.append(iu)
        cap.append(0)
    orig = cap[:]
    s, t = 0, 1
    total = 0
    while True:
        level = [-1] * n
        level[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for e in adj[u]:
                if cap[e] > 0 and level[head[e]] < 0:
                    level[head[e]] = level[u] + 1
                    queue.append(head[e])
        if level[t] < 0:
            break
        ptr = [0] * n
        while True:
            pushed = _augment(s, t, adj, head, cap, level, ptr)
            if not pushed:
                break
            total += pushed
    reach = {s}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for e in adj[u]:
            if cap[e] > 0 and head[e] not in reach:
                reach.add(head[e])
                queue.append(head[e])
    names = {i: v for v, i in index.items()}
    cut = 0
    flows = []
    for k in range(len(edges)):
        e = 2 * k
        flows.append(Fraction(orig[e] - cap[e], scale))
        if head[e ^ 1] in reach and head[e] not in reach:
            cut += orig[e]
    return MaxFlowResult(Fraction(total, scale), flows, frozenset(names[i] for i in reach), Fraction(cut, scale))


def _augment(s, t, adj, head, cap, level, ptr) -> int:
    # one blocking-flow path, found by an explicit-stack DFS over the level graph
    stack = [s]
    edges_taken: list[int] = []
    while stack:
        u = stack[-1]
        if u == t:
            bottleneck = min(cap[e] for e in edges_taken)
            for e in edges_taken:
                cap[e] -= bottleneck
                cap[e ^ 1] += bottleneck
            return bottleneck
        advanced = False
        while ptr[u] < len(adj[u]):
            e = adj[u][ptr[u]]
            v = head[e]
            if cap[e] > 0 and level[v] == level[u] + 1:
                stack.append(v)
                edges_taken.append(e)
                advanced = True
                break
            ptr[u] += 1
        if not advanced:
            level[u] = -1  # dead end
            stack.pop()
            if edges_taken:
                edges_taken.pop()
                ptr[stack[-1]] += 1
    return 0


@dataclass(frozen=True)
class TimeExpandedNetwork:
    """Copies ``(v, i)`` of every node per interval, linked by capacitated arcs.

    ``edges`` holds ``(tail, head, capacity, key)`` where ``key`` is
    ``("arc", arc_id, i)``, ``("store", v, i)`` (storage carried from ``t_i``
    into interval ``i + 1``) or ``("src", i)`` / ``("snk", i)`` for the links to
    the super terminals.
    """

    grid: Discretization
    edges: tuple

    def edge_list(self) -> list[tuple]:
        return [(u, v, c) for u, v, c, _ in self.edges]


def build_time_expanded(inst: Instance, grid: Discretization, outages: OutageMap) -> TimeExpandedNetwork:
    check_grid(inst, grid)
    net = inst.network
    shut: dict[str, set[int]] = {}
    for arc, intervals in outages.items():
        bad = [i for i in intervals if not 1 <= i <= grid.n]
        if bad:
            raise ValueError(f"outage intervals {bad} of arc {arc} lie outside 1..{grid.n}")
        shut[arc] = set(intervals)
    edges = []
    for i in grid.intervals():
        length = grid.length(i)
        for a in net.arcs:
            c = Fraction(0) if i in shut.get(a.id, ()) else length * a.cap
            edges.append(((a.tail, i), (a.head, i), c, ("arc", a.id, i)))
        supply = sum((length * a.cap for a in net.out_arcs(net.source)), Fraction(0))
        demand = sum((length * a.cap for a in net.in_arcs(net.sink)), Fraction(0))
        edges.append((SUPER_SOURCE, (net.source, i), supply, ("src", i)))
        edges.append(((net.sink, i), SUPER_SINK, demand, ("snk", i)))
        if i < grid.n:
            for v, u in net.storage.items():
                edges.append(((v, i), (v, i + 1), u, ("store", v, i)))
    return TimeExpandedNetwork(grid, tuple(edges))


@dataclass
class FlowSolution:
    value: Fraction
    grid: Discretization
    arc_flows: dict = field(default_factory=dict)  # (arc_id, i) -> flow
    storage: dict = field(default_factory=dict)  # (v, i) -> level at t_i, i = 0..n
    cut_capacity: Fraction | None = None

    def to_dict(self) -> dict:
        return {
            "value": format_rational(self.value),
            "grid": [format_rational(p) for p in self.grid.points],
            "flows": {f"{a}@{i}": format_rational(x) for (a, i), x in sorted(self.arc_flows.items()) if x},
            "storage": {f"{v}@{i}": format_rational(x) for (v, i), x in sorted(self.storage.items()) if x},
        }


def solve_time_expanded(inst: Instance, ten: TimeExpandedNetwork) -> FlowSolution:
    res = max_flow(ten.edge_list(), SUPER_SOURCE, SUPER_SINK)
    sol = FlowSolution(res.value, ten.grid, cut_capacity=res.cut_capacity)
    for v in inst.network.storage:
        sol.storage[(v, 0)] = Fraction(0)
        sol.storage[(v, ten.grid.n)] = Fraction(0)
    for (_, _, _, key), x in zip(ten.edges, res.flows):
        if key[0] == "arc":
            sol.arc_flows[(key[1], key[2])] = x
        elif key[0] == "store":
            sol.storage[(key[1], key[2])] = x
    return sol


def evaluate_schedule(inst: Instance, sched: Schedule) -> FlowSolution:
    """Total flow over the horizon achieved by ``sched``, computed exactly."""
    require_feasible(inst, sched)
    grid, outages = induced_grid(inst, sched)
    return solve_time_expanded(inst, build_time_expanded(inst, grid, outages))


def evaluate_value(inst: Instance, sched: Schedule) -> Fraction:
    return evaluate_schedule(inst, sched).value


def evaluate_schedule_lp(inst: Instance, sched: Schedule) -> Fraction:
    """Same quantity as :func:`evaluate_schedule`, via the bundled rational LP solver."""
    from .milp import solve_lp
    from .models.flow import schedule_flow_lp

    res = solve_lp(schedule_flow_lp(inst, sched))
    if res.status != "optimal":
        raise RuntimeError(f"flow LP ended with status {res.status}")
    return res.objective


def static_max_flow(inst: Instance, closed: Iterable[str] = ()) -> Fraction:
    """Maximum flow rate through the network with the arcs in ``closed`` removed."""
    net = inst.network
    closed = set(closed)
    edges = [(a.tail, a.head, a.cap) for a in net.arcs if a.id not in closed]
    if not edges:
        return Fraction(0)
    return max_flow(edges, net.source, net.sink).value
