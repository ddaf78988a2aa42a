"""Linear and mixed-binary model containers with exact rational data."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from ..core import to_rational

CONTINUOUS = "continuous"
BINARY = "binary"

OPTIMAL = "optimal"
FEASIBLE_AT_LIMIT = "feasible-at-limit"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
LIMIT_NO_INCUMBENT = "limit-no-incumbent"

_SENSES = {"<=": "<=", "=<": "<=", "=": "=", "==": "=", ">=": ">=", "=>": ">="}


class ModelError(ValueError):
    pass


def _bound(x) -> Fraction | None:
    return None if x is None else to_rational(x)


@dataclass(frozen=True)
class Variable:
    """``lb``/``ub`` of ``None`` mean minus/plus infinity."""

    name: str
    kind: str = CONTINUOUS
    lb: Fraction | None = Fraction(0)
    ub: Fraction | None = None
    tags: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class Constraint:
    name: str
    coeffs: dict
    sense: str
    rhs: Fraction

    def activity(self, assignment: Mapping[str, Fraction]) -> Fraction:
        return sum((c * assignment[v] for v, c in self.coeffs.items()), Fraction(0))

    def violation(self, assignment: Mapping[str, Fraction]) -> Fraction:
        """Amount by which ``assignment`` misses the constraint (0 when satisfied)."""
        lhs = self.activity(assignment)
        if self.sense == "<=":
            return max(Fraction(0), lhs - self.rhs)
        if self.sense == ">=":
            return max(Fraction(0), self.rhs - lhs)
        return abs(lhs - self.rhs)


class MilpModel:
    """A linear objective over continuous and binary variables with linear constraints.

    Builders mutate a model freely; solvers never modify the model they receive.
    """

    def __init__(self, name: str = "model"):
        self.name = name
        self.variables: dict[str, Variable] = {}
        self.constraints: list[Constraint] = []
        self._cnames: set[str] = set()
        self.objective: dict[str, Fraction] = {}
        self.sense = "max"
        self.constant = Fraction(0)
        self.meta: dict = {}

    def __repr__(self) -> str:
        nb = len(self.binaries())
        return (f"MilpModel({self.name!r}, vars={len(self.variables)}, binaries={nb}, "
                f"constraints={len(self.constraints)}, sense={self.sense})")

    # construction

    def add_var(self, name: str, kind: str = CONTINUOUS, lb=0, ub=None, **tags) -> str:
        if name in self.variables:
            raise ModelError(f"duplicate variable {name!r}")
        if kind not in (CONTINUOUS, BINARY):
            raise ModelError(f"unknown variable kind {kind!r}")
        lb, ub = _bound(lb), _bound(ub)
        if kind == BINARY:
            lb, ub = Fraction(0), Fraction(1)
        if lb is not None and ub is not None and lb > ub:
            raise ModelError(f"variable {name!r} has empty domain [{lb}, {ub}]")
        self.variables[name] = Variable(name, kind, lb, ub, dict(tags))
        return name

    def add_binary(self, name: str, **tags) -> str:
        return self.add_var(name, BINARY, **tags)

    def add_constraint(self, coeffs: Mapping[str, object], sense: str, rhs=0, name: str | None = None) -> Constraint:
        if sense not in _SENSES:
            raise ModelError(f"unknown constraint sense {sense!r}")
        if name is None:
            name = f"c{len(self.constraints)}"
        if name in self._cnames:
            raise ModelError(f"duplicate constraint {name!r}")
        clean: dict[str, Fraction] = {}
        for v, c in coeffs.items():
            if v not in self.variables:
                raise ModelError(f"constraint {name!r} references undeclared variable {v!r}")
            c = clean.get(v, Fraction(0)) + to_rational(c)
            if c:
                clean[v] = c
            else:
                clean.pop(v, None)
        con = Constraint(name, clean, _SENSES[sense], to_rational(rhs))
        self.constraints.append(con)
        self._cnames.add(name)
        return con

    def set_objective(self, coeffs: Mapping[str, object], sense: str = "max", constant=0) -> None:
        if sense not in ("max", "min"):
            raise ModelError(f"objective sense must be max or min, got {sense!r}")
        obj = {}
        for v, c in coeffs.items():
            if v not in self.variables:
                raise ModelError(f"objective references undeclared variable {v!r}")
            c = obj.get(v, Fraction(0)) + to_rational(c)
            if c:
                obj[v] = c
            else:
                obj.pop(v, None)
        self.objective = obj
        self.sense = sense
        self.constant = to_rational(constant)

    def set_bounds(self, name: str, lb=0, ub=None) -> None:
        var = self.variables[name]
        lb, ub = _bound(lb), _bound(ub)
        if lb is not None and ub is not None and lb > ub:
            raise ModelError(f"variable {name!r} would have empty domain [{lb}, {ub}]")
        self.variables[name] = Variable(name, var.kind, lb, ub, var.tags)

    # queries

    def var_names(self) -> list[str]:
        return list(self.variables)

    def binaries(self) -> list[str]:
        return [v.name for v in self.variables.values() if v.kind == BINARY]

    def vars_with(self, **tags) -> list[Variable]:
        return [v for v in self.variables.values() if all(v.tags.get(k) == x for k, x in tags.items())]

    def constraint(self, name: str) -> Constraint:
        for c in self.constraints:
            if c.name == name:
                return c
        raise KeyError(name)

    def evaluate(self, assignment: Mapping[str, Fraction]) -> Fraction:
        return self.constant + sum((c * assignment[v] for v, c in self.objective.items()), Fraction(0))

    def check(self, assignment: Mapping[str, object], integrality: bool = True) -> list[str]:
        """All violated bounds, integrality requirements and constraints, as text."""
        out = []
        vals = {}
        for name, var in self.variables.items():
            if name not in assignment:
                out.append(f"{name}: missing value")
                continue
            x = vals[name] = to_rational(assignment[name])
            if var.lb is not None and x < var.lb:
                out.append(f"{name}: {x} below lower bound {var.lb}")
            if var.ub is not None and x > var.ub:
                out.append(f"{name}: {x} above upper bound {var.ub}")
            if integrality and var.kind == BINARY and x not in (0, 1):
                out.append(f"{name}: {x} is not binary")
        unknown = set(assignment) - set(self.variables)
        out.extend(f"{name}: not a model variable" for name in sorted(unknown))
        if any(msg.endswith("missing value") for msg in out):
            return out
        for con in self.constraints:
            if con.violation(vals):
                out.append(f"{con.name}: {con.activity(vals)} {con.sense} {con.rhs} violated")
        return out

    # derived models

    def copy(self, name: str | None = None) -> MilpModel:
        m = MilpModel(self.name if name is None else name)
        m.variables = dict(self.variables)
        m.constraints = list(self.constraints)
        m._cnames = set(self._cnames)
        m.objective = dict(self.objective)
        m.sense = self.sense
        m.constant = self.constant
        m.meta = dict(self.meta)
        return m

    def relaxed(self) -> MilpModel:
        m = self.copy()
        for name, v in m.variables.items():
            if v.kind == BINARY:
                m.variables[name] = Variable(name, CONTINUOUS, v.lb, v.ub, v.tags)
        return m

    def fixed(self, assignment: Mapping[str, object]) -> MilpModel:
        m = self.copy()
        for name, x in assignment.items():
            x = to_rational(x)
            m.set_bounds(name, x, x)
        return m


@dataclass
class Snapshot:
    """Search state recorded at a requested time or node count.

    ``lp_assignment`` is the LP solution of the open node with the best bound
    (``None`` once the tree is exhausted); ``incumbent`` is the best feasible
    assignment known at that moment.
    """

    trigger: str
    at: float
    elapsed: float
    nodes: int
    bound: Fraction | None
    lp_value: Fraction | None
    lp_assignment: dict | None
    incumbent_value: Fraction | None
    incumbent: dict | None


@dataclass
class MilpResult:
    status: str
    objective: Fraction | None = None
    assignment: dict | None = None
    bound: Fraction | None = None
    nodes: int = 0
    elapsed: float = 0.0
    snapshots: list = field(default_factory=list)
    root_bound: Fraction | None = None
    root_assignment: dict | None = None
    message: str = ""

    @property
    def has_incumbent(self) -> bool:
        return self.assignment is not None

    def value(self, name: str) -> Fraction:
        if self.assignment is None:
            raise ModelError(f"no incumbent (status {self.status})")
        return self.assignment[name]
