"""Exact bounded-variable simplex over rationals.

Every row ``i`` gets a logical variable ``r_i = sum_j a_ij x_j`` whose bounds
encode the constraint sense, so the system is homogeneous and all data lives in
variable bounds.  The tableau is kept in dictionary form: each basic variable is
a sparse linear combination of the nonbasic ones, so exact steepest-edge
weights are cheap; pricing uses them, falling back to Bland's smallest-index
rule after a run of degenerate pivots (which guarantees termination).  A bounded dual simplex re-optimizes after bound
changes, which is what branch-and-bound uses.
"""
from __future__ import annotations

from fractions import Fraction

from gmpy2 import mpq

from .model import INFEASIBLE, OPTIMAL, UNBOUNDED, MilpModel, MilpResult

ZERO = mpq(0)
_DEGENERATE_RUN = 50  # degenerate pivots tolerated before switching to Bland
_MAX_ITER = 2_000_000


def to_mpq(x) -> mpq | None:
    if x is None:
        return None
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    return mpq(x)


def to_fraction(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


class Tableau:
    """Dictionary-form simplex state.  Copy it to branch."""

    __slots__ = ("n", "lb", "ub", "rows", "cols", "val", "obj", "z", "cost", "iterations")

    def copy(self) -> Tableau:
        t = Tableau.__new__(Tableau)
        t.n = self.n
        t.lb = self.lb[:]
        t.ub = self.ub[:]
        t.rows = {b: dict(r) for b, r in self.rows.items()}
        t.cols = {j: set(s) for j, s in self.cols.items()}
        t.val = self.val[:]
        t.obj = dict(self.obj)
        t.z = self.z
        t.cost = self.cost
        t.iterations = 0
        return t

    # construction

    @classmethod
    def build(cls, n: int, rows: list[dict[int, mpq]], row_lb, row_ub, lb, ub) -> Tableau:
        t = cls.__new__(cls)
        m = len(rows)
        t.n = n
        t.lb = list(lb) + list(row_lb)
        t.ub = list(ub) + list(row_ub)
        t.val = []
        for j in range(n):
            if t.lb[j] is not None:
                t.val.append(t.lb[j])
            elif t.ub[j] is not None:
                t.val.append(t.ub[j])
            else:
                t.val.append(ZERO)
        t.rows = {}
        t.cols = {}
        t.iterations = 0
        for i, row in enumerate(rows):
            r = n + i
            t.rows[r] = dict(row)
            t.val.append(sum((c * t.val[j] for j, c in row.items()), ZERO))
            for j in row:
                t.cols.setdefault(j, set()).add(r)
        for j in range(n):
            t.cols.setdefault(j, set())
        t.obj = {}
        t.z = ZERO
        t.cost = {}
        return t

    def is_basic(self, j: int) -> bool:
        return j in self.rows

    def infeasibility(self, j: int):
        """Signed bound violation of variable ``j``: negative below lb, positive above ub."""
        x, lo, hi = self.val[j], self.lb[j], self.ub[j]
        if lo is not None and x < lo:
            return x - lo
        if hi is not None and x > hi:
            return x - hi
        return ZERO

    def set_objective(self, cost: dict[int, mpq]) -> None:
        """Maximize ``sum cost[j] * x_j``."""
        obj: dict[int, mpq] = {}
        for j, c in cost.items():
            if not c:
                continue
            if j in self.rows:
                for k, v in self.rows[j].items():
                    obj[k] = obj.get(k, ZERO) + c * v
            else:
                obj[j] = obj.get(j, ZERO) + c
        self.obj = {k: v for k, v in obj.items() if v}
        self.cost = dict(cost)
        self.z = sum((c * self.val[j] for j, c in cost.items()), ZERO)

    # elementary operations

    def _move(self, q: int, theta) -> None:
        """Change nonbasic ``q`` by ``theta`` and update the basics that depend on it."""
        if not theta:
            return
        val = self.val
        val[q] += theta
        rows = self.rows
        for b in self.cols[q]:
            val[b] += rows[b][q] * theta
        d = self.obj.get(q)
        if d:
            self.z += d * theta

    def pivot(self, p: int, q: int) -> None:
        """Basic ``p`` leaves, nonbasic ``q`` enters.  Values are not touched."""
        rows, cols = self.rows, self.cols
        row_p = rows.pop(p)
        a = row_p.pop(q)
        inv = 1 / a
        new = {j: -c * inv for j, c in row_p.items()}
        new[p] = inv
        for j in row_p:
            cols[j].discard(p)
        users = cols.pop(q)
        users.discard(p)
        for b in users:
            row = rows[b]
            c = row.pop(q)
            for j, v in new.items():
                w = row.get(j)
                if w is None:
                    row[j] = c * v
                    cols.setdefault(j, set()).add(b)
                else:
                    w += c * v
                    if w:
                        row[j] = w
                    else:
                        del row[j]
                        cols[j].discard(b)
        rows[q] = new
        for j in new:
            cols.setdefault(j, set()).add(q)
        cols.setdefault(p, set())
        d = self.obj.pop(q, None)
        if d:
            obj = self.obj
            for j, v in new.items():
                w = obj.get(j, ZERO) + d * v
                if w:
                    obj[j] = w
                else:
                    obj.pop(j, None)

    def remove_nonbasic(self, j: int) -> None:
        """Drop a nonbasic column fixed at zero from the tableau."""
        for b in self.cols.pop(j):
            del self.rows[b][j]
        self.obj.pop(j, None)

    # primal simplex

    def primal(self) -> str:
        """Maximize the current objective from a primal feasible basis."""
        lb, ub, val, rows, cols = self.lb, self.ub, self.val, self.rows, self.cols
        degenerate = 0
        while True:
            self.iterations += 1
            if self.iterations > _MAX_ITER:
                raise RuntimeError("simplex iteration limit exceeded")
            bland = degenerate >= _DEGENERATE_RUN
            q, best = None, ZERO
            for j, d in self.obj.items():
                if d > 0:
                    if ub[j] is not None and val[j] >= ub[j]:
                        continue
                elif lb[j] is not None and val[j] <= lb[j]:
                    continue
                if bland:
                    if q is None or j < q:
                        q = j
                    continue
                score = d * d / (1 + sum(rows[b][j] ** 2 for b in cols[j]))  # exact steepest edge
                if score > best or (score == best and q is not None and j < q):
                    q, best = j, score
            if q is None:
                return OPTIMAL
            direction = 1 if self.obj[q] > 0 else -1
            theta, leave, leave_at = None, None, None
            if lb[q] is not None and ub[q] is not None:
                theta = ub[q] - lb[q]
            rows = self.rows
            for b in self.cols[q]:
                c = rows[b][q] * direction
                if c > 0:
                    if ub[b] is None:
                        continue
                    step = (ub[b] - val[b]) / c
                    bound = ub[b]
                else:
                    if lb[b] is None:
                        continue
                    step = (val[b] - lb[b]) / -c
                    bound = lb[b]
                if step < 0:
                    step = ZERO
                if theta is None or step < theta or (step == theta and leave is not None and b < leave):
                    theta, leave, leave_at = step, b, bound
            if theta is None:
                return UNBOUNDED
            if theta:
                degenerate = 0
            else:
                degenerate += 1
            self._move(q, theta * direction)
            if leave is not None:
                val[leave] = leave_at
                self.pivot(leave, q)

    # dual simplex

    def dual(self, cutoff=None) -> str:
        """Restore primal feasibility while keeping the reduced costs optimal.

        The leaving row maximizes squared infeasibility over the exact
        steepest-edge weight ``1 + |row|^2``.

        Returns ``optimal``, ``infeasible``, or ``cutoff`` once the objective
        (an upper bound throughout) drops to ``cutoff`` or below.
        """
        lb, ub, val, rows = self.lb, self.ub, self.val, self.rows
        stall = 0
        while True:
            if cutoff is not None and self.z <= cutoff:
                return "cutoff"
            self.iterations += 1
            if self.iterations > _MAX_ITER:
                raise RuntimeError("simplex iteration limit exceeded")
            bland = stall >= _DEGENERATE_RUN
            p, worst = None, ZERO
            for b in rows:
                x = val[b]
                if lb[b] is not None and x < lb[b]:
                    v = lb[b] - x
                elif ub[b] is not None and x > ub[b]:
                    v = x - ub[b]
                else:
                    continue
                if bland:
                    if p is None or b < p:
                        p = b
                    continue
                v = v * v / (1 + sum(c * c for c in rows[b].values()))  # exact steepest-edge weight
                if v > worst or (v == worst and b < p):
                    p, worst = b, v
            if p is None:
                return OPTIMAL
            raise_up = lb[p] is not None and val[p] < lb[p]
            target = lb[p] if raise_up else ub[p]
            q, ratio = None, None
            obj = self.obj
            for j, a in rows[p].items():
                lo, hi = lb[j], ub[j]
                if lo is not None and hi is not None and lo == hi:
                    continue
                increase = (a > 0) == raise_up
                if increase:
                    if hi is not None and val[j] >= hi:
                        continue
                elif lo is not None and val[j] <= lo:
                    continue
                r = abs(obj.get(j, ZERO) / a)
                if ratio is None or r < ratio:
                    q, ratio, size = j, r, abs(a)
                elif r == ratio:
                    # ties: Bland wants the smallest index, otherwise prefer the largest pivot
                    if (j < q) if bland else (abs(a) > size or (abs(a) == size and j < q)):
                        q, size = j, abs(a)
            if q is None:
                return INFEASIBLE
            z0 = self.z
            self._move(q, (target - val[p]) / rows[p][q])
            val[p] = target
            self.pivot(p, q)
            stall = stall + 1 if self.z == z0 else 0

    # bound changes

    def set_bounds(self, j: int, lo, hi) -> None:
        """Change bounds of ``j``; a nonbasic ``j`` is moved onto its new domain."""
        self.lb[j], self.ub[j] = lo, hi
        if j in self.rows:
            return
        x = self.val[j]
        if lo is not None and x < lo:
            self._move(j, lo - x)
        elif hi is not None and x > hi:
            self._move(j, hi - x)


class LPRelaxation:
    """Exact LP relaxation of a :class:`MilpModel` (binaries relaxed to [0, 1])."""

    def __init__(self, model: MilpModel):
        self.model = model
        self.names = model.var_names()
        self.index = {v: k for k, v in enumerate(self.names)}
        self.sign = 1 if model.sense == "max" else -1
        n = len(self.names)
        rows, rlb, rub = [], [], []
        for con in model.constraints:
            rows.append({self.index[v]: to_mpq(c) for v, c in con.coeffs.items()})
            rhs = to_mpq(con.rhs)
            rlb.append(rhs if con.sense in (">=", "=") else None)
            rub.append(rhs if con.sense in ("<=", "=") else None)
        lb = [to_mpq(model.variables[v].lb) for v in self.names]
        ub = [to_mpq(model.variables[v].ub) for v in self.names]
        self.tableau = Tableau.build(n, rows, rlb, rub, lb, ub)
        self.cost = {self.index[v]: to_mpq(c) * self.sign for v, c in model.objective.items()}
        self.status: str | None = None

    def solve(self) -> str:
        t = self.tableau
        for j in range(t.n):
            lo, hi = t.lb[j], t.ub[j]
            if lo is not None and hi is not None and lo > hi:
                self.status = INFEASIBLE
                return self.status
        artificial = []
        n_vars = len(t.val)
        for r in list(t.rows):
            v = t.val[r]
            lo, hi = t.lb[r], t.ub[r]
            if lo is not None and v < lo:
                beta, sigma = lo, -1
            elif hi is not None and v > hi:
                beta, sigma = hi, 1
            else:
                continue
            e = n_vars + len(artificial)
            artificial.append(e)
            row = t.rows.pop(r)
            for j in row:
                t.cols[j].discard(r)
            new = {j: sigma * c for j, c in row.items()}
            new[r] = mpq(-sigma)
            t.rows[e] = new
            for j in new:
                t.cols.setdefault(j, set()).add(e)
            t.val[r] = beta
            t.val.append(sigma * (v - beta))
            t.lb.append(ZERO)
            t.ub.append(None)
        if artificial:
            t.set_objective({e: mpq(-1) for e in artificial})
            t.primal()
            if t.z < 0:
                self.status = INFEASIBLE
                return self.status
            for e in artificial:
                t.ub[e] = ZERO
                if e in t.rows:
                    self._drive_out(e)
                if e not in t.rows:
                    t.remove_nonbasic(e)
        t.set_objective(self.cost)
        self.status = t.primal()
        return self.status

    def _drive_out(self, e: int) -> None:
        t = self.tableau
        for j, c in sorted(t.rows[e].items()):
            lo, hi = t.lb[j], t.ub[j]
            if c and not (lo is not None and hi is not None and lo == hi):
                t.pivot(e, j)
                return

    @property
    def objective(self) -> Fraction:
        return to_fraction(self.tableau.z) * self.sign + self.model.constant

    def values(self) -> dict[str, Fraction]:
        val = self.tableau.val
        return {v: to_fraction(val[k]) for k, v in enumerate(self.names)}

    def raw(self, k: int) -> mpq:
        return self.tableau.val[k]


def solve_lp(model: MilpModel) -> MilpResult:
    """Solve the LP relaxation of ``model`` exactly."""
    lp = LPRelaxation(model)
    status = lp.solve()
    if status != OPTIMAL:
        return MilpResult(status, nodes=1)
    obj = lp.objective
    values = lp.values()
    return MilpResult(OPTIMAL, obj, values, obj, nodes=1, root_bound=obj, root_assignment=values)
