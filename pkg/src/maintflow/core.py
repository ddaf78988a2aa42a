"""Instances, schedules, validation, JSON I/O and a random instance generator.

Every scalar (time, capacity, flow) is held as a :class:`fractions.Fraction`.
Floats are rejected on input so that nothing downstream ever needs a tolerance.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping

Rational = Fraction


class InstanceError(ValueError):
    """Raised for malformed instance or schedule data."""


class InfeasibleScheduleError(ValueError):
    """Raised when a schedule violates a job window or misses a job."""


def to_rational(value) -> Fraction:
    """Convert ``value`` to an exact rational.

    Accepts ints, Fractions, gmpy2 ``mpq`` values and strings of the form
    ``"7"``, ``"-3"`` or ``"7/2"``. Floats and bools are refused.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise TypeError(f"refusing inexact float {value!r}; use a Fraction or 'num/den' string")
    if isinstance(value, str):
        text = value.strip()
        num, sep, den = text.partition("/")
        try:
            if sep:
                return Fraction(int(num), int(den))
            return Fraction(int(num))
        except (ValueError, ZeroDivisionError):
            raise InstanceError(f"not a rational literal: {value!r}") from None
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        return Fraction(int(value.numerator), int(value.denominator))
    raise TypeError(f"cannot convert {type(value).__name__} to a rational")


def format_rational(value) -> str:
    q = to_rational(value)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Arc:
    id: str
    tail: str
    head: str
    cap: Fraction

    def __post_init__(self):
        object.__setattr__(self, "cap", to_rational(self.cap))


@dataclass(frozen=True, eq=True)
class Network:
    nodes: tuple[str, ...]
    arcs: tuple[Arc, ...]
    source: str
    sink: str
    storage: Mapping[str, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        arcs = tuple(a if isinstance(a, Arc) else Arc(*a) for a in self.arcs)
        object.__setattr__(self, "arcs", arcs)
        object.__setattr__(self, "storage", {v: to_rational(c) for v, c in dict(self.storage).items()})

    def arc(self, arc_id: str) -> Arc:
        for a in self.arcs:
            if a.id == arc_id:
                return a
        raise KeyError(arc_id)

    def out_arcs(self, v: str) -> list[Arc]:
        return [a for a in self.arcs if a.tail == v]

    def in_arcs(self, v: str) -> list[Arc]:
        return [a for a in self.arcs if a.head == v]


@dataclass(frozen=True)
class Job:
    arc: str
    release: Fraction
    deadline: Fraction
    processing: Fraction

    def __post_init__(self):
        for name in ("release", "deadline", "processing"):
            object.__setattr__(self, name, to_rational(getattr(self, name)))

    @property
    def latest_start(self) -> Fraction:
        return self.deadline - self.processing


@dataclass(frozen=True)
class Instance:
    """A network, its maintenance jobs and the planning horizon.

    ``simultaneous`` lists pairs of job arcs that must be processed at the
    same time; it is only produced by node splitting of storage nodes.
    """

    network: Network
    jobs: tuple[Job, ...]
    horizon: Fraction
    simultaneous: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "jobs", tuple(self.jobs))
        object.__setattr__(self, "horizon", to_rational(self.horizon))
        object.__setattr__(self, "simultaneous", tuple(tuple(p) for p in self.simultaneous))

    @property
    def job_arcs(self) -> list[str]:
        return [j.arc for j in self.jobs]

    def job(self, arc_id: str) -> Job:
        for j in self.jobs:
            if j.arc == arc_id:
                return j
        raise KeyError(arc_id)

    @property
    def has_storage(self) -> bool:
        return bool(self.network.storage)

    def is_integral(self) -> bool:
        values = [self.horizon]
        values += [a.cap for a in self.network.arcs]
        values += list(self.network.storage.values())
        for j in self.jobs:
            values += [j.release, j.deadline, j.processing]
        return all(v.denominator == 1 for v in values)

    def without_storage(self) -> Instance:
        net = self.network
        return Instance(Network(net.nodes, net.arcs, net.source, net.sink, {}), self.jobs, self.horizon,
                        self.simultaneous)

    def with_storage(self, storage: Mapping[str, object]) -> Instance:
        net = self.network
        return Instance(Network(net.nodes, net.arcs, net.source, net.sink, dict(storage)), self.jobs,
                        self.horizon, self.simultaneous)


@dataclass(frozen=True)
class Schedule:
    starts: Mapping[str, Fraction]

    def __post_init__(self):
        object.__setattr__(self, "starts", {a: to_rational(t) for a, t in dict(self.starts).items()})

    def __getitem__(self, arc_id: str) -> Fraction:
        return self.starts[arc_id]

    def as_tuple(self, inst: Instance) -> tuple[Fraction, ...]:
        return tuple(self.starts[a] for a in inst.job_arcs)


def validate_instance(inst: Instance) -> list[str]:
    """Return a description of every violated invariant; empty when valid."""
    problems: list[str] = []
    net = inst.network
    nodes = set(net.nodes)
    if len(nodes) != len(net.nodes):
        problems.append("nodes: duplicate node id")
    for name, v in (("source", net.source), ("sink", net.sink)):
        if v not in nodes:
            problems.append(f"{name}: unknown node {v!r}")
    if net.source == net.sink:
        problems.append("source/sink: source must differ from sink")
    seen: set[str] = set()
    for a in net.arcs:
        if a.id in seen:
            problems.append(f"arcs[{a.id}].id: duplicate arc id")
        seen.add(a.id)
        for end in ("tail", "head"):
            if getattr(a, end) not in nodes:
                problems.append(f"arcs[{a.id}].{end}: unknown node {getattr(a, end)!r}")
        if a.cap < 0:
            problems.append(f"arcs[{a.id}].cap: negative capacity")
    for v, cap in net.storage.items():
        if v not in nodes:
            problems.append(f"storage[{v}]: unknown node")
        if v in (net.source, net.sink):
            problems.append(f"storage[{v}]: storage is not allowed at the source or sink")
        if cap < 0:
            problems.append(f"storage[{v}]: negative capacity")
    T = inst.horizon
    if T <= 0:
        problems.append("horizon: must be positive")
    job_seen: set[str] = set()
    for j in inst.jobs:
        tag = f"jobs[{j.arc}]"
        if j.arc in job_seen:
            problems.append(f"{tag}.arc: more than one job on this arc")
        job_seen.add(j.arc)
        if j.arc not in seen:
            problems.append(f"{tag}.arc: unknown arc")
        if j.release < 0:
            problems.append(f"{tag}.r: release before time 0")
        if j.processing <= 0:
            problems.append(f"{tag}.p: processing time must be positive")
        if j.release + j.processing > j.deadline:
            problems.append(f"{tag}.d: deadline violation r+p>d")
        if j.deadline > T:
            problems.append(f"{tag}.d: deadline after horizon")
    for pair in inst.simultaneous:
        if len(pair) != 2 or any(a not in job_seen for a in pair):
            problems.append(f"simultaneous{list(pair)}: pair must name two job arcs")
            continue
        ja, jb = inst.job(pair[0]), inst.job(pair[1])
        if (ja.release, ja.deadline, ja.processing) != (jb.release, jb.deadline, jb.processing):
            problems.append(f"simultaneous{list(pair)}: linked jobs must have identical parameters")
    return problems


def check_instance(inst: Instance) -> Instance:
    problems = validate_instance(inst)
    if problems:
        raise InstanceError("; ".join(problems))
    return inst


def is_feasible(inst: Instance, sched: Schedule) -> bool:
    """True iff every job is scheduled inside its window (and linked jobs coincide)."""
    job_arcs = set(inst.job_arcs)
    unknown = set(sched.starts) - job_arcs
    if unknown:
        raise KeyError(f"schedule names arcs without jobs: {sorted(unknown)}")
    for j in inst.jobs:
        if j.arc not in sched.starts:
            return False
        if not j.release <= sched.starts[j.arc] <= j.latest_start:
            return False
    return all(sched.starts[a] == sched.starts[b] for a, b in inst.simultaneous)


def require_feasible(inst: Instance, sched: Schedule) -> None:
    try:
        ok = is_feasible(inst, sched)
    except KeyError as exc:
        raise InfeasibleScheduleError(exc.args[0]) from None
    if not ok:
        raise InfeasibleScheduleError(f"schedule {format_schedule(sched)} is not feasible")


def format_schedule(sched: Schedule) -> str:
    return "{" + ", ".join(f"{a}: {format_rational(t)}" for a, t in sched.starts.items()) + "}"


def midpoint_schedule(inst: Instance) -> Schedule:
    """Start every job at ``floor((r + d - p) / 2)``, clamped into its window."""
    starts = {}
    for j in inst.jobs:
        t = Fraction(math.floor((j.release + j.latest_start) / 2))
        starts[j.arc] = min(max(t, j.release), j.latest_start)
    for a, b in inst.simultaneous:
        starts[b] = starts[a]
    return Schedule(starts)


# --------------------------------------------------------------------- JSON

def instance_to_dict(inst: Instance) -> dict:
    net = inst.network
    data = {
        "horizon": format_rational(inst.horizon),
        "nodes": list(net.nodes),
        "source": net.source,
        "sink": net.sink,
        "arcs": [{"id": a.id, "tail": a.tail, "head": a.head, "cap": format_rational(a.cap)} for a in net.arcs],
        "storage": {v: format_rational(c) for v, c in net.storage.items()},
        "jobs": [
            {"arc": j.arc, "r": format_rational(j.release), "d": format_rational(j.deadline),
             "p": format_rational(j.processing)}
            for j in inst.jobs
        ],
    }
    if inst.simultaneous:
        data["simultaneous"] = [list(p) for p in inst.simultaneous]
    return data


def _field(obj: dict, key: str, where: str):
    if not isinstance(obj, dict) or key not in obj:
        raise InstanceError(f"{where}: missing field {key!r}")
    return obj[key]


def _number(obj: dict, key: str, where: str) -> Fraction:
    raw = _field(obj, key, where)
    if isinstance(raw, bool) or not isinstance(raw, (str, int)):
        raise InstanceError(f"{where}.{key}: expected a decimal-integer or 'num/den' string, got {raw!r}")
    try:
        return to_rational(raw)
    except InstanceError as exc:
        raise InstanceError(f"{where}.{key}: {exc}") from None


def instance_from_dict(data: dict) -> Instance:
    """Build and validate an instance from its JSON dictionary form."""
    if not isinstance(data, dict):
        raise InstanceError("instance: top level must be an object")
    arcs = []
    ids: set[str] = set()
    for k, raw in enumerate(_field(data, "arcs", "instance")):
        where = f"arcs[{k}]"
        arc_id = str(_field(raw, "id", where))
        if arc_id in ids:
            raise InstanceError(f"{where}.id: duplicate arc id {arc_id!r}")
        ids.add(arc_id)
        arcs.append(Arc(arc_id, str(_field(raw, "tail", where)), str(_field(raw, "head", where)),
                        _number(raw, "cap", where)))
    storage_raw = data.get("storage", {}) or {}
    if not isinstance(storage_raw, dict):
        raise InstanceError("storage: expected an object")
    storage = {}
    for v in storage_raw:
        storage[str(v)] = _number(storage_raw, v, "storage")
    jobs = []
    for k, raw in enumerate(_field(data, "jobs", "instance")):
        where = f"jobs[{k}]"
        jobs.append(Job(str(_field(raw, "arc", where)), _number(raw, "r", where), _number(raw, "d", where),
                        _number(raw, "p", where)))
    nodes = _field(data, "nodes", "instance")
    if not isinstance(nodes, list):
        raise InstanceError("nodes: expected a list")
    network = Network(tuple(str(v) for v in nodes), tuple(arcs), str(_field(data, "source", "instance")),
                      str(_field(data, "sink", "instance")), storage)
    simultaneous = tuple(tuple(str(a) for a in p) for p in data.get("simultaneous", []))
    inst = Instance(network, tuple(jobs), _number(data, "horizon", "instance"), simultaneous)
    return check_instance(inst)


def _load_json(path) -> dict:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def dumps_instance(inst: Instance) -> str:
    return json.dumps(instance_to_dict(inst), indent=2) + "\n"


def load_instance(path) -> Instance:
    try:
        return instance_from_dict(_load_json(path))
    except InstanceError as exc:
        msg = str(exc)
        raise InstanceError(msg if msg.startswith(str(path)) else f"{path}: {msg}") from None


def save_instance(inst: Instance, path) -> None:
    Path(path).write_text(dumps_instance(inst))


def schedule_to_dict(sched: Schedule) -> dict:
    return {"starts": {a: format_rational(t) for a, t in sched.starts.items()}}


def schedule_from_dict(data: dict) -> Schedule:
    starts = _field(data, "starts", "schedule")
    if not isinstance(starts, dict):
        raise InstanceError("schedule.starts: expected an object")
    return Schedule({str(a): _number(starts, a, "starts") for a in starts})


def load_schedule(path) -> Schedule:
    try:
        return schedule_from_dict(_load_json(path))
    except InstanceError as exc:
        raise InstanceError(f"{path}: {exc}") from None


def save_schedule(sched: Schedule, path) -> None:
    Path(path).write_text(json.dumps(schedule_to_dict(sched), indent=2) + "\n")


# ---------------------------------------------------------------- generator

@dataclass(frozen=True)
class GeneratorParams:
    """Knobs of the random instance generator.

    This generator is a stand-in written for property testing; it does not
    reproduce any published instance family.
    """

    nodes: int = 5
    arcs: int = 7
    cap_range: tuple[int, int] = (1, 5)
    jobs: int = 3
    window_range: tuple[int, int] = (3, 6)
    processing_range: tuple[int, int] = (1, 3)
    horizon: int = 10
    storage_nodes: int = 0
    storage_range: tuple[int, int] = (1, 4)

    def check(self) -> None:
        if self.nodes < 2:
            raise InstanceError("generator: need at least two nodes")
        if self.arcs < self.nodes - 1 or self.arcs > self.nodes * (self.nodes - 1):
            raise InstanceError("generator: arc count must allow an s-t path and no parallel arcs")
        if self.jobs > self.arcs:
            raise InstanceError("generator: more jobs than arcs")
        wlo, whi = self.window_range
        plo, phi = self.processing_range
        if not 0 < plo <= phi:
            raise InstanceError("generator: bad processing-time range")
        if phi > wlo:
            raise InstanceError("generator: maximum processing time exceeds the narrowest window")
        if not wlo <= whi <= self.horizon:
            raise InstanceError("generator: window range must fit inside the horizon")
        if self.storage_nodes > max(self.nodes - 2, 0):
            raise InstanceError("generator: too many storage nodes")
        if self.cap_range[0] < 0 or self.cap_range[0] > self.cap_range[1]:
            raise InstanceError("generator: bad capacity range")


def generate_instance(seed: int, params: GeneratorParams | None = None) -> Instance:
    """Draw a random valid instance; a pure function of ``(seed, params)``."""
    params = params or GeneratorParams()
    params.check()
    rng = random.Random(seed)
    names = ["s"] + [f"v{k}" for k in range(1, params.nodes - 1)] + ["t"]
    inner = names[1:-1]
    path = ["s"] + rng.sample(inner, rng.randint(0, len(inner))) + ["t"]
    pairs = list(zip(path, path[1:]))
    candidates = [(u, v) for u in names for v in names if u != v and (u, v) not in pairs]
    rng.shuffle(candidates)
    pairs += candidates[: params.arcs - len(pairs)]
    lo, hi = params.cap_range
    arcs = tuple(Arc(f"a{k}", u, v, Fraction(rng.randint(max(lo, 1) if k < len(path) - 1 else lo, hi)))
                 for k, (u, v) in enumerate(pairs))
    storage = {}
    for v in sorted(rng.sample(inner, params.storage_nodes)):
        storage[v] = Fraction(rng.randint(*params.storage_range))
    jobs = []
    for arc in sorted(rng.sample(arcs, params.jobs), key=lambda a: int(a.id[1:])):
        width = rng.randint(*params.window_range)
        p = rng.randint(params.processing_range[0], min(params.processing_range[1], width))
        r = rng.randint(0, params.horizon - width)
        jobs.append(Job(arc.id, r, r + width, p))
    inst = Instance(Network(tuple(names), arcs, "s", "t", storage), tuple(jobs), params.horizon)
    return check_instance(inst)


def iter_instances(seeds: Iterable[int], params: GeneratorParams) -> Iterable[Instance]:
    for seed in seeds:
        yield generate_instance(seed, params)
