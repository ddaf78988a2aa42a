"""Acceptance criteria, one test each; every test prints a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -v`` (the lines are printed even with
output capture on) or ``python3 tests/test_acceptance.py``.
"""
import functools
import itertools
import random
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction as F
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from conftest import sched, small_params  # noqa: E402
from test_milp import enumerate_optimum, random_model  # noqa: E402

from maintflow.bench import gap_lower, gap_upper, performance_profile, shifted_geomean  # noqa: E402
from maintflow.bounds import bound_lb, bound_ub, solve_ctip  # noqa: E402
from maintflow.catalog import fractional_optimum_instance, two_arc_instance  # noqa: E402
from maintflow.core import Schedule, generate_instance, is_feasible  # noqa: E402
from maintflow.evaluator import evaluate_schedule, evaluate_schedule_lp, evaluate_value  # noqa: E402
from maintflow.exact import (closure_and_freedom, exact_search_no_storage, grid_oracle,  # noqa: E402
                             optimal_schedules, shift_bound, shift_schedule, union)
from maintflow.heuristics import com_heuristic, heuristic_pipeline, induced_xi, projection_heuristic  # noqa: E402
from maintflow.milp import solve_milp  # noqa: E402
from maintflow.timegrid import is_conformal, release_deadline_grid, unit_grid  # noqa: E402

RESULTS = {}


def criterion(number, title):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            start = time.perf_counter()
            try:
                fn(*args, **kwargs)
            except BaseException as exc:
                _report(number, title, False, time.perf_counter() - start, exc)
                raise
            _report(number, title, True, time.perf_counter() - start)
        return run
    return wrap


def _report(number, title, ok, elapsed, exc=None):
    RESULTS[number] = ok
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {title} ({elapsed:.1f} s)"
    if exc is not None:
        line += f" [{type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}]"
    capman = _CAPTURE.get("manager")
    if capman is not None:
        with capman.global_and_fixture_disabled():
            print("\n" + line, flush=True)
    else:
        print(line, flush=True)


_CAPTURE = {}


@pytest.fixture(autouse=True)
def _uncaptured(request):
    _CAPTURE["manager"] = request.config.pluginmanager.getplugin("capturemanager")
    yield


# --- the shared instance suite


@dataclass
class Case:
    name: str
    inst: object
    grids: dict
    lb: object = None
    ub: dict = field(default_factory=dict)
    exact: tuple | None = None
    ctip: object = None


def suite_instances():
    cases = []
    for k in range(30):
        params = small_params(jobs=2 + k % 2, horizon=8 + 2 * (k % 3 == 0), nodes=4 + (k % 4 == 0),
                              arcs=5 + k % 3)
        cases.append((f"plain-{k:02d}", generate_instance(k, params)))
    for k in range(24):
        params = small_params(jobs=2 + k % 2, storage_nodes=1, horizon=8 + 2 * (k % 3 == 0), arcs=5 + k % 2)
        cases.append((f"storage-{k:02d}", generate_instance(100 + k, params)))
    return cases


_SUITE = {}


def build_suite():
    """Solve every model on every suite instance once (cached for the suite criteria)."""
    if "cases" in _SUITE:
        return _SUITE["cases"], _SUITE["elapsed"]
    start = time.perf_counter()
    cases = []
    for name, inst in suite_instances():
        grids = {"rd": release_deadline_grid(inst), "unit": unit_grid(inst)}
        c = Case(name, inst, grids)
        c.lb = bound_lb(inst, grids["unit"])
        for g, grid in grids.items():
            c.ub[g] = bound_ub(inst, grid)
        if not inst.has_storage:
            c.exact = exact_search_no_storage(inst)
        c.ctip = solve_ctip(inst, node_limit=5000)
        cases.append(c)
    _SUITE["cases"], _SUITE["elapsed"] = cases, time.perf_counter() - start
    return _SUITE["cases"], _SUITE["elapsed"]


# --- criteria


@criterion(1, "two-arc example values and continuous-time optima")
def test_criterion_1_fig1_regression():
    start = time.perf_counter()
    plain, stored = two_arc_instance(), two_arc_instance(2)
    assert evaluate_value(plain, sched(a=0, b=0)) == 1
    assert evaluate_value(plain, sched(a=1, b=0)) == 0
    assert evaluate_value(stored, sched(a=1, b=0)) == 2
    assert evaluate_value(stored, sched(a=0, b=0)) == 1
    for inst, value, start_a in ((plain, 1, 0), (stored, 2, 1)):
        res = solve_ctip(inst)
        assert res.optimal and res.value == value
        assert res.schedule["a"] == start_a
    assert time.perf_counter() - start < 1


@criterion(2, "fractional optimum: grid oracle, continuous-time model, unit-grid lower bound")
def test_criterion_2_example1_regression():
    start = time.perf_counter()
    inst = fractional_optimum_instance()
    s, v = grid_oracle(inst, F(1, 2))
    assert (s["a"], v) == (F(3, 2), 16)
    res = solve_ctip(inst)
    assert res.optimal and res.value == 16
    lb = bound_lb(inst, unit_grid(inst))
    assert lb.optimal and lb.value < 16
    assert lb.value == max(evaluate_value(inst, sched(a=t, b=3, c=0, d=0)) for t in (0, 1, 2))
    assert time.perf_counter() - start < 10


@criterion(3, "sandwich: LB(unit) <= optimum <= UB(grid) <= LP(grid) on the suite")
def test_criterion_3_sandwich():
    cases, elapsed = build_suite()
    assert len(cases) >= 50
    for c in cases:
        inst = c.inst
        assert len(inst.network.nodes) <= 6 and len(inst.jobs) <= 4 and inst.horizon <= 20 and inst.is_integral
        assert is_conformal(inst, c.grids["unit"])
        if c.exact is not None:
            ref = c.exact[1]
        else:
            assert c.ctip.optimal, f"{c.name}: continuous-time model not certified ({c.ctip.status})"
            ref = c.ctip.value
        assert c.lb.optimal and c.lb.value <= ref, c.name
        for g, ub in c.ub.items():
            assert ub.optimal, f"{c.name}/{g}"
            assert ref <= ub.bound <= ub.lp_bound, f"{c.name}/{g}"
    assert sum(c.inst.has_storage for c in cases) >= 20
    assert elapsed < 300, f"suite took {elapsed:.0f} s"


@criterion(4, "integer data without storage: LB(unit) = exact search = continuous-time model")
def test_criterion_4_integral_optimality():
    cases, _ = build_suite()
    plain = [c for c in cases if not c.inst.has_storage]
    assert plain
    for c in plain:
        assert c.ctip.optimal, c.name
        assert c.lb.value == c.exact[1] == c.ctip.value, c.name
        assert evaluate_value(c.inst, c.lb.schedule) == c.lb.value


@criterion(5, "evaluator equals the flow LP and the min-cut certificate on 100 pairs")
def test_criterion_5_oracle_equivalence():
    rng = random.Random(2024)
    for k in range(100):
        inst = generate_instance(500 + k, small_params(jobs=1 + k % 3, storage_nodes=k % 2))
        s = Schedule({j.arc: j.release + F(rng.randint(0, int(3 * (j.latest_start - j.release))), 3)
                      for j in inst.jobs})
        sol = evaluate_schedule(inst, s)
        assert sol.value == evaluate_schedule_lp(inst, s)
        assert sol.cut_capacity == sol.value


@criterion(6, "free closed sets of exact optima shift without changing the value")
def test_criterion_6_shifting():
    cases, _ = build_suite()
    shifted = 0
    for c in cases:
        if c.inst.has_storage:
            continue
        # the lexicographically smallest optimum has no free set, so every optimum in the
        # candidate product is checked
        opts, value = optimal_schedules(c.inst)
        assert opts[0] == c.exact[0] and value == c.exact[1]
        for s in opts:
            _, sets = closure_and_freedom(c.inst, s)
            free = [x for x in sets if x.free]
            for r in range(1, len(free) + 1):
                for combo in itertools.combinations(free, r):
                    closed = union(combo)
                    eps = shift_bound(c.inst, s, closed)
                    for e in (eps, -eps, eps / 2, -eps / 3):
                        moved = shift_schedule(c.inst, s, closed.jobs, e, closed)
                        assert evaluate_value(c.inst, moved) == value, c.name
                        shifted += 1
    assert shifted > 0


@criterion(7, "heuristic fixed points on 100 schedules; pipeline outputs feasible and below the best upper bound")
def test_criterion_7_heuristics():
    rng = random.Random(77)
    for k in range(100):
        inst = generate_instance(900 + k, small_params(jobs=3, processing_range=(2, 3), storage_nodes=k % 2))
        grid = unit_grid(inst)
        s = Schedule({j.arc: j.release + F(rng.randint(0, int(4 * (j.latest_start - j.release))), 4)
                      for j in inst.jobs})
        z = induced_xi(inst, grid, s)
        assert projection_heuristic(inst, grid, z) == s
        assert com_heuristic(inst, grid, z) == s
    cases, _ = build_suite()
    for c in cases:
        best_ub = min(ub.bound for ub in c.ub.values())
        rep = heuristic_pipeline(c.inst, c.grids["rd"], tau_nodes=5)
        for run in rep.runs:
            assert is_feasible(c.inst, run.schedule)
            assert run.value == evaluate_value(c.inst, run.schedule) <= best_ub, c.name


@criterion(8, "bench arithmetic: shifted geometric mean, gaps, profiles")
def test_criterion_8_bench():
    assert shifted_geomean([0, 3], 1) == 1
    assert gap_upper(102, 100) == 2 and gap_upper(5, 5) == 0
    assert gap_lower(16, 15) == F(20, 3)
    curves = performance_profile({"A": [0, 2, 4], "B": [1, 1, 7]})
    for c in curves:
        fs = [f for _, f in c.points]
        assert fs == sorted(fs) and fs[-1] == 1
    assert curves[0].points == ((0, F(1, 3)), (2, F(2, 3)), (4, 1))


@criterion(9, "branch and bound equals binary enumeration on 30 random models")
def test_criterion_9_milp_oracle():
    rng = random.Random(31)
    for k in range(30):
        m = random_model(rng, rng.randint(2, 12) if k % 3 else 12, rng.randint(0, 3), rng.randint(2, 6))
        assert len(m.binaries()) <= 12
        res = solve_milp(m)
        assert res.objective == enumerate_optimum(m), f"model {k}"


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
