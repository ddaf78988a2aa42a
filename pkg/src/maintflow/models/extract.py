"""Reading schedules and processing intensities out of solver assignments."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from ..core import Instance, Schedule, require_feasible
from ..milp.model import MilpModel, MilpResult, ModelError
from ..timegrid import Discretization
from . import ctip, tdip


@dataclass(frozen=True)
class ZVector:
    """Per-job processing intensities ``values[a][i]`` in [0, 1] on touchable intervals."""

    grid: Discretization
    values: dict

    def mass(self, arc: str) -> Fraction:
        return sum((self.grid.length(i) * z for i, z in self.values.get(arc, {}).items()), Fraction(0))

    def to_dict(self) -> dict:
        from ..core import format_rational

        return {a: {str(i): format_rational(z) for i, z in sorted(row.items())} for a, row in self.values.items()}


def _assignment(source) -> Mapping[str, Fraction]:
    if isinstance(source, MilpResult):
        if source.assignment is None:
            raise ModelError(f"no incumbent to extract from (status {source.status})")
        return source.assignment
    return source


def extract_schedule(inst: Instance, model: MilpModel, source) -> Schedule:
    """Start times encoded by a CTIP or lower-bound assignment."""
    values = _assignment(source)
    kind = model.meta.get("kind")
    starts = {}
    if kind == "ctip":
        M = model.meta["M"]
        for a in inst.job_arcs:
            on = [i for i in range(1, M + 1) if values[ctip.wname(a, i)] == 1]
            if not on:
                raise ModelError(f"arc {a} is never shut in the assignment")
            starts[a] = values[ctip.tname(on[0] - 1)]
    elif kind == "tdip_lb":
        grid = model.meta["grid"]
        sets = model.meta["sets"]
        for a in inst.job_arcs:
            on = [i for i in sets.S[a] if values[tdip.yname(a, i)] == 1]
            if len(on) != 1:
                raise ModelError(f"job {a} has {len(on)} start indicators set")
            starts[a] = grid.points[on[0] - 1]
    else:
        raise ModelError(f"cannot read a schedule from a {kind!r} model")
    sched = Schedule(starts)
    require_feasible(inst, sched)
    return sched


def extract_zvector(inst: Instance, model: MilpModel, source) -> ZVector:
    """``z`` values of a fixed-grid model, clipped to [0, 1]."""
    values = _assignment(source)
    if model.meta.get("kind") not in ("tdip", "tdip_lb"):
        raise ModelError("z vectors come from fixed-grid models")
    sets = model.meta["sets"]
    out = {}
    for a in inst.job_arcs:
        row = {}
        for i in sets.T[a]:
            name = tdip.zname(a, i)
            if name not in values:
                raise ModelError(f"assignment lacks {name}")
            row[i] = min(Fraction(1), max(Fraction(0), Fraction(values[name])))
        out[a] = row
    return ZVector(model.meta["grid"], out)
