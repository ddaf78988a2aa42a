"""Time discretizations of the planning horizon.

A discretization is a strictly increasing tuple ``0 = t_0 < ... < t_n = T``;
interval ``i`` (1-based) is ``[t_{i-1}, t_i)``.
"""
from __future__ import annotations

import json
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .core import Instance, InstanceError, Schedule, format_rational, require_feasible, to_rational

OutageMap = dict  # job arc -> tuple of 1-based interval indices during which the arc is shut


class GridError(ValueError):
    pass


@dataclass(frozen=True)
class Discretization:
    points: tuple[Fraction, ...]

    def __post_init__(self):
        pts = tuple(to_rational(p) for p in self.points)
        if len(pts) < 2:
            raise GridError("a discretization needs at least the points 0 and T")
        if pts[0] != 0:
            raise GridError("a discretization must start at 0")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise GridError("discretization points must be strictly increasing")
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return len(self.points) - 1

    @property
    def horizon(self) -> Fraction:
        return self.points[-1]

    def length(self, i: int) -> Fraction:
        return self.points[i] - self.points[i - 1]

    def interval(self, i: int) -> tuple[Fraction, Fraction]:
        return self.points[i - 1], self.points[i]

    def intervals(self) -> range:
        return range(1, self.n + 1)

    def index_of(self, t) -> int:
        """Index ``k`` with ``points[k] == t``; raises if ``t`` is not a breakpoint."""
        t = to_rational(t)
        k = bisect_left(self.points, t)
        if k == len(self.points) or self.points[k] != t:
            raise KeyError(f"{t} is not a breakpoint")
        return k

    def containing(self, t) -> int:
        """1-based index of the interval ``[t_{i-1}, t_i)`` holding ``t``."""
        t = to_rational(t)
        if not 0 <= t < self.horizon:
            raise GridError(f"time {t} outside [0, T)")
        return bisect_right(self.points, t)

    def to_json(self) -> str:
        return json.dumps([format_rational(p) for p in self.points])

    @classmethod
    def from_json(cls, text: str) -> Discretization:
        return cls(tuple(to_rational(p) for p in json.loads(text)))

    @classmethod
    def from_points(cls, points: Iterable) -> Discretization:
        return cls(tuple(sorted({to_rational(p) for p in points})))


def check_grid(inst: Instance, grid: Discretization) -> None:
    if grid.horizon != inst.horizon:
        raise GridError(f"grid ends at {grid.horizon}, horizon is {inst.horizon}")


def induced_grid(inst: Instance, sched: Schedule) -> tuple[Discretization, OutageMap]:
    """Breakpoints induced by a schedule and the interval sets during which each job arc is shut.

    Coincident breakpoints are merged, so no interval has zero length.
    """
    require_feasible(inst, sched)
    pts = {Fraction(0), inst.horizon}
    for j in inst.jobs:
        t = sched[j.arc]
        pts.update((t, t + j.processing))
    grid = Discretization.from_points(pts)
    outages = {}
    for j in inst.jobs:
        t = sched[j.arc]
        lo, hi = grid.index_of(t), grid.index_of(t + j.processing)
        outages[j.arc] = tuple(range(lo + 1, hi + 1))
    return grid, outages


def release_deadline_grid(inst: Instance) -> Discretization:
    pts = {Fraction(0), inst.horizon}
    for j in inst.jobs:
        pts.update((j.release, j.deadline))
    return Discretization.from_points(pts)


def unit_grid(inst: Instance) -> Discretization:
    T = inst.horizon
    if T.denominator != 1 or T <= 0:
        raise GridError(f"unit grid needs a positive integer horizon, got {format_rational(T)}")
    return Discretization(tuple(Fraction(k) for k in range(int(T) + 1)))


def is_conformal(inst: Instance, grid: Discretization) -> bool:
    gamma = set(grid.points)
    for j in inst.jobs:
        if j.release not in gamma or j.deadline not in gamma:
            return False
    for t in grid.points:
        for j in inst.jobs:
            if j.release <= t <= j.latest_start and t + j.processing not in gamma:
                return False
            if j.release + j.processing <= t <= j.deadline and t - j.processing not in gamma:
                return False
    return True


def conformal_closure(inst: Instance, seed: Discretization | Iterable | None = None,
                      max_points: int = 100_000) -> Discretization:
    """Smallest conformal superset of ``seed`` and the release/deadline grid.

    Raises :class:`GridError` once more than ``max_points`` breakpoints would be
    needed; rational data with incommensurable processing times can require
    arbitrarily many.
    """
    gamma = set(release_deadline_grid(inst).points)
    if seed is not None:
        gamma.update(seed.points if isinstance(seed, Discretization) else (to_rational(p) for p in seed))
    if any(not 0 <= t <= inst.horizon for t in gamma):
        raise GridError("seed points must lie in [0, T]")
    work = sorted(gamma)
    while work:
        if len(gamma) > max_points:
            raise GridError(f"conformal closure exceeds {max_points} points")
        t = work.pop()
        for j in inst.jobs:
            new = []
            if j.release <= t <= j.latest_start:
                new.append(t + j.processing)
            if j.release + j.processing <= t <= j.deadline:
                new.append(t - j.processing)
            for u in new:
                if u not in gamma:
                    gamma.add(u)
                    work.append(u)
    if len(gamma) > max_points:
        raise GridError(f"conformal closure exceeds {max_points} points")
    return Discretization.from_points(gamma)


def grid_from_selector(inst: Instance, selector: str, path=None, max_points: int = 100_000) -> Discretization:
    """Resolve one of ``rd``, ``unit``, ``conformal`` or ``file``."""
    if selector == "rd":
        return release_deadline_grid(inst)
    if selector == "unit":
        return unit_grid(inst)
    if selector == "conformal":
        return conformal_closure(inst, None, max_points)
    if selector == "file":
        if path is None:
            raise InstanceError("grid selector 'file' needs a grid file")
        with open(path) as fh:
            grid = Discretization.from_json(fh.read())
        check_grid(inst, grid)
        return grid
    raise GridError(f"unknown grid selector {selector!r}")
