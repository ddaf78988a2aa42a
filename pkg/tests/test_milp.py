import itertools
import random
from fractions import Fraction as F

import pytest

from maintflow.milp import (BINARY, FEASIBLE_AT_LIMIT, INFEASIBLE, LIMIT_NO_INCUMBENT, OPTIMAL, UNBOUNDED,
                            MilpModel, ModelError, WarmStartError, solve_lp, solve_milp, warm_start)


def knapsack(capacity=7):
    m = MilpModel("knap")
    w = {"x1": 5, "x2": 4, "x3": 3}
    v = {"x1": 10, "x2": 40, "x3": 30}
    for name in w:
        m.add_binary(name)
    m.add_constraint(w, "<=", capacity, name="weight")
    m.set_objective(v, "max")
    return m


def random_model(rng, n_bin, n_cont, n_cons):
    m = MilpModel("rand")
    names = []
    for k in range(n_bin):
        names.append(m.add_binary(f"b{k}"))
    for k in range(n_cont):
        names.append(m.add_var(f"x{k}", lb=0, ub=rng.randint(1, 6)))
    for k in range(n_cons):
        coeffs = {v: F(rng.randint(-4, 6), rng.choice((1, 1, 2, 3))) for v in rng.sample(names, min(4, len(names)))}
        m.add_constraint(coeffs, rng.choice(("<=", "<=", ">=", "=")) if k else "<=", rng.randint(-2, 8),
                         name=f"c{k}")
    m.set_objective({v: rng.randint(-3, 7) for v in names}, rng.choice(("max", "min")), constant=rng.randint(-2, 2))
    return m


def enumerate_optimum(m):
    """Best objective over all binary assignments, each completed by an LP."""
    bins = m.binaries()
    best = None
    better = (lambda a, b: a > b) if m.sense == "max" else (lambda a, b: a < b)
    for bits in itertools.product((0, 1), repeat=len(bins)):
        res = solve_lp(m.fixed(dict(zip(bins, bits))))
        if res.status == OPTIMAL and (best is None or better(res.objective, best)):
            best = res.objective
    return best


def test_lp_small_known_optimum():
    m = MilpModel()
    m.add_var("x")
    m.add_var("y")
    m.add_constraint({"x": 1, "y": 2}, "<=", 4)
    m.add_constraint({"x": 3, "y": 1}, "<=", 6)
    m.set_objective({"x": 1, "y": 1}, "max")
    res = solve_lp(m)
    # vertex of x + 2y = 4 and 3x + y = 6
    assert res.status == OPTIMAL
    assert (res.value("x"), res.value("y"), res.objective) == (F(8, 5), F(6, 5), F(14, 5))
    assert m.check(res.assignment) == []


def test_lp_infeasible_and_unbounded():
    m = MilpModel()
    m.add_var("x", ub=1)
    m.add_constraint({"x": 1}, ">=", 2)
    assert solve_lp(m).status == INFEASIBLE
    m = MilpModel()
    m.add_var("x", lb=None)
    m.add_var("y")
    m.add_constraint({"x": 1, "y": -1}, "<=", 3)
    m.set_objective({"x": 1, "y": 1}, "max")
    assert solve_lp(m).status == UNBOUNDED


def test_lp_free_variable_and_equality():
    m = MilpModel()
    m.add_var("x", lb=None, ub=None)
    m.add_var("y", lb=-2, ub=5)
    m.add_constraint({"x": 1, "y": 1}, "=", F(1, 3))
    m.set_objective({"x": 2, "y": 1}, "min")
    res = solve_lp(m)
    assert res.objective == F(2, 3) - 5
    assert m.check(res.assignment) == []


def test_lp_matches_scipy_on_random_models():
    scipy = pytest.importorskip("scipy.optimize")
    rng = random.Random(7)
    for _ in range(60):
        m = random_model(rng, 0, 5, 4).relaxed()
        res = solve_lp(m)
        names = m.var_names()
        sign = -1 if m.sense == "max" else 1
        c = [sign * float(m.objective.get(v, 0)) for v in names]
        A_ub, b_ub, A_eq, b_eq = [], [], [], []
        for con in m.constraints:
            row = [float(con.coeffs.get(v, 0)) for v in names]
            if con.sense == "=":
                A_eq.append(row)
                b_eq.append(float(con.rhs))
            elif con.sense == "<=":
                A_ub.append(row)
                b_ub.append(float(con.rhs))
            else:
                A_ub.append([-x for x in row])
                b_ub.append(-float(con.rhs))
        bounds = [(m.variables[v].lb, m.variables[v].ub) for v in names]
        bounds = [(None if lo is None else float(lo), None if hi is None else float(hi)) for lo, hi in bounds]
        ref = scipy.linprog(c, A_ub or None, b_ub or None, A_eq or None, b_eq or None, bounds=bounds,
                            method="highs")
        if ref.status == 2:
            assert res.status == INFEASIBLE
        else:
            assert ref.status == 0 and res.status == OPTIMAL
            assert abs(float(res.objective) - float(m.constant) - sign * ref.fun) < 1e-7
            assert m.check(res.assignment) == []


def test_knapsack():
    res = solve_milp(knapsack())
    assert res.status == OPTIMAL
    assert res.objective == 70 == res.bound
    assert (res.value("x1"), res.value("x2"), res.value("x3")) == (0, 1, 1)
    assert res.root_bound >= res.objective


def test_bnb_matches_enumeration():
    rng = random.Random(3)
    for _ in range(25):
        m = random_model(rng, rng.randint(1, 6), rng.randint(0, 3), rng.randint(2, 5))
        res = solve_milp(m)
        ref = enumerate_optimum(m)
        if ref is None:
            assert res.status == INFEASIBLE
        else:
            assert res.status == OPTIMAL and res.objective == ref
            assert m.check(res.assignment) == []


def test_node_limit_and_snapshots():
    rng = random.Random(11)
    m = random_model(rng, 10, 2, 6)
    while solve_milp(m).nodes < 6:
        m = random_model(rng, 10, 2, 6)
    res = solve_milp(m, node_limit=3, snapshot_nodes=[1, 3, 99])
    assert res.status in (FEASIBLE_AT_LIMIT, LIMIT_NO_INCUMBENT)
    assert res.nodes == 3
    assert [s.at for s in res.snapshots] == [1, 3, 99]
    first = res.snapshots[0]
    assert first.lp_value == res.root_bound and first.lp_assignment is not None
    late = res.snapshots[-1]  # still pending at the limit: fires with the best open node
    assert late.nodes == 3 and late.lp_assignment is not None
    assert late.lp_value == res.bound or res.has_incumbent
    if res.has_incumbent:
        better = (lambda a, b: a >= b) if m.sense == "max" else (lambda a, b: a <= b)
        assert better(res.bound, res.objective)


def test_limits_must_be_positive():
    with pytest.raises(ValueError):
        solve_milp(knapsack(), node_limit=0)
    with pytest.raises(ValueError):
        solve_milp(knapsack(), time_limit=-1)


def test_warm_start_completion_and_errors():
    m = knapsack()
    ws = warm_start(m, {"x1": 1, "x2": 0, "x3": 0})
    assert ws.value == 10
    with pytest.raises(WarmStartError, match="binary without a value"):
        warm_start(m, {"x1": 1})
    with pytest.raises(WarmStartError, match="not binary"):
        warm_start(m, {"x1": F(1, 2), "x2": 0, "x3": 0})
    with pytest.raises(WarmStartError, match="weight"):
        warm_start(m, {"x1": 1, "x2": 1, "x3": 1})
    res = solve_milp(m, start={"x1": 1, "x2": 0, "x3": 0})
    assert res.objective == 70


def test_heuristic_candidates_are_checked():
    m = knapsack(capacity=6)  # root LP takes x2 and 2/3 of x3
    calls = []

    def bogus(values):
        calls.append(values)
        return {"x1": 1, "x2": 1, "x3": 1}  # violates the weight limit

    res = solve_milp(m, heuristic=bogus)
    assert calls and res.objective == 40

    def good(values):
        return {"x1": 0, "x2": 1, "x3": 0}

    plain = solve_milp(m)
    res = solve_milp(m, heuristic=good)
    assert res.objective == plain.objective == 40
    assert res.nodes <= plain.nodes


def test_model_validation():
    m = MilpModel()
    m.add_var("x")
    with pytest.raises(ModelError):
        m.add_var("x")
    with pytest.raises(ModelError):
        m.add_constraint({"y": 1}, "<=", 1)
    with pytest.raises(ModelError):
        m.add_constraint({"x": 1}, "<", 1)
    with pytest.raises(ModelError):
        m.add_var("z", lb=2, ub=1)
    m.add_constraint({"x": 1}, "<=", 1, name="cap")
    with pytest.raises(ModelError):
        m.add_constraint({"x": 1}, "<=", 1, name="cap")
    assert m.check({"x": 2}) == ["cap: 2 <= 1 violated"]
    assert m.check({}) == ["x: missing value"]
    m.add_binary("b")
    assert m.variables["b"].kind == BINARY
    assert "b: 1/2 is not binary" in m.check({"x": 0, "b": F(1, 2)})
    assert m.check({"x": 0, "b": F(1, 2)}, integrality=False) == []
