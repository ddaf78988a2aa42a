"""Side constraints for practical variants: precedence, incompatibility, node jobs."""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable

from ..core import Arc, Instance, InstanceError, Job, Network
from ..milp.model import MilpModel, ModelError
from . import ctip, tdip


def _kind(m: MilpModel) -> str:
    kind = m.meta.get("kind")
    if kind not in ("ctip", "tdip", "tdip_lb"):
        raise ModelError(f"model kind {kind!r} does not support side constraints")
    return kind


def _check_jobs(inst: Instance, arcs: Iterable[str]) -> None:
    known = set(inst.job_arcs)
    for a in arcs:
        if a not in known:
            raise InstanceError(f"arc {a!r} has no maintenance job")


def add_precedence(m: MilpModel, inst: Instance, first: str, second: str) -> MilpModel:
    """Require the job on ``first`` to finish before the job on ``second`` starts.

    Exact for the continuous-time model.  On a fixed grid a start of ``first``
    at or after ``t_{i-1}`` forbids ``second`` from starting in any interval
    that ends by ``t_{i-1} + p_first``.
    """
    if first == second:
        raise ModelError("a job cannot precede itself")
    _check_jobs(inst, (first, second))
    kind = _kind(m)
    out = m.copy()
    if kind == "ctip":
        M = m.meta["M"]
        for i in range(1, M + 1):
            for j in range(1, i + 1):
                out.add_constraint({ctip.wname(first, i): 1, ctip.wname(second, j): 1}, "<=", 1,
                                   name=f"prec[{first},{second},{i},{j}]")
        return out
    grid, sets = m.meta["grid"], m.meta["sets"]
    t = grid.points
    p = inst.job(first).processing
    for i in sets.S[first]:
        coeffs = {tdip.yname(first, k): 1 for k in sets.S[first] if k >= i}
        for j in sets.S[second]:
            if t[j] <= t[i - 1] + p:
                coeffs[tdip.yname(second, j)] = 1
        out.add_constraint(coeffs, "<=", 1, name=f"prec[{first},{second},{i}]")
    return out


def add_incompatibility(m: MilpModel, inst: Instance, arcs: Iterable[str], limit: int = 1) -> MilpModel:
    """At most ``limit`` of the jobs on ``arcs`` may be in progress in any interval."""
    arcs = list(dict.fromkeys(arcs))
    if len(arcs) < 2:
        raise ModelError("an incompatible set needs at least two jobs")
    if limit < 1:
        raise ModelError("the concurrency limit must be positive")
    _check_jobs(inst, arcs)
    kind = _kind(m)
    out = m.copy()
    tag = ",".join(arcs)
    if kind == "ctip":
        for i in range(1, m.meta["M"] + 1):
            out.add_constraint({ctip.wname(a, i): 1 for a in arcs}, "<=", limit, name=f"incompat[{tag},{i}]")
        return out
    sets = m.meta["sets"]
    for i in range(1, m.meta["grid"].n + 1):
        coeffs = {tdip.zname(a, i): 1 for a in arcs if i in sets.T[a]}
        if len(coeffs) > limit:
            out.add_constraint(coeffs, "<=", limit, name=f"incompat[{tag},{i}]")
    return out


def add_simultaneous(m: MilpModel, inst: Instance, first: str, second: str) -> MilpModel:
    """Force two jobs to be processed at the same time (equal shut indicators)."""
    _check_jobs(inst, (first, second))
    kind = _kind(m)
    out = m.copy()
    if kind == "ctip":
        for i in range(1, m.meta["M"] + 1):
            out.add_constraint({ctip.wname(first, i): 1, ctip.wname(second, i): -1}, "=", 0,
                               name=f"same[{first},{second},{i}]")
        return out
    sets = m.meta["sets"]
    if sets.T[first] != sets.T[second]:
        raise ModelError(f"jobs {first} and {second} have different windows")
    for i in sets.T[first]:
        out.add_constraint({tdip.zname(first, i): 1, tdip.zname(second, i): -1}, "=", 0,
                           name=f"same[{first},{second},{i}]")
    return out


def split_node(inst: Instance, v: str, mode: str = "both", job: tuple | None = None) -> Instance:
    """Replace node ``v`` by a chain so that a job on ``v`` becomes a job on an arc.

    A plain node becomes ``v' -> v''``; a storage node becomes
    ``v' -> v'' -> v'''`` with the storage moved to ``v''``.  Each new arc gets
    capacity ``min(sum of inbound, sum of outbound)``.  ``job = (r, d, p)``
    adds the node job: on the inbound arc, the outbound arc, or (``mode="both"``
    on a storage node) on both, recorded as a simultaneous pair.
    """
    net = inst.network
    if v in (net.source, net.sink):
        raise InstanceError("the source and sink cannot be split")
    if v not in net.nodes:
        raise InstanceError(f"unknown node {v!r}")
    if mode not in ("inbound", "outbound", "both"):
        raise InstanceError(f"unknown split mode {mode!r}")
    cap = min(sum((a.cap for a in net.in_arcs(v)), Fraction(0)),
              sum((a.cap for a in net.out_arcs(v)), Fraction(0)))
    v1, v2, v3 = f"{v}'", f"{v}''", f"{v}'''"
    storage = dict(net.storage)
    is_storage = v in storage
    last = v3 if is_storage else v2
    nodes = []
    for n in net.nodes:
        nodes += ([v1, v2, v3] if is_storage else [v1, v2]) if n == v else [n]
    taken = set(nodes)
    if len(taken) != len(nodes):
        raise InstanceError(f"split node names for {v!r} collide with existing nodes")
    arcs = []
    for a in net.arcs:
        tail = last if a.tail == v else a.tail
        head = v1 if a.head == v else a.head
        arcs.append(Arc(a.id, tail, head, a.cap))
    ids = {a.id for a in arcs}
    new_in, new_out = f"{v}:in", f"{v}:out"
    if new_in in ids or new_out in ids:
        raise InstanceError(f"split arc ids for {v!r} collide with existing arcs")
    arcs.append(Arc(new_in, v1, v2, cap))
    if is_storage:
        arcs.append(Arc(new_out, v2, v3, cap))
        storage[v2] = storage.pop(v)
    jobs = list(inst.jobs)
    simultaneous = list(inst.simultaneous)
    if job is not None:
        r, d, p = job
        if not is_storage or mode == "inbound":
            jobs.append(Job(new_in, r, d, p))
        elif mode == "outbound":
            jobs.append(Job(new_out, r, d, p))
        else:
            jobs += [Job(new_in, r, d, p), Job(new_out, r, d, p)]
            simultaneous.append((new_in, new_out))
    return Instance(Network(tuple(nodes), tuple(arcs), net.source, net.sink, storage), tuple(jobs),
                    inst.horizon, tuple(simultaneous))
