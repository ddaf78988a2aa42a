import random
from fractions import Fraction as F

import pytest

from maintflow.core import Schedule, generate_instance, is_feasible
from maintflow.evaluator import evaluate_value
from maintflow.milp import INFEASIBLE, OPTIMAL, ModelError, solve_lp, solve_milp, warm_start
from maintflow.models import (add_incompatibility, add_precedence, add_simultaneous, build_ctip, build_tdip,
                              build_tdip_lb, ctip_assignment, ctip_full_assignment, ctip_rounding, ctip_start,
                              extract_schedule, extract_zvector, interval_sets, split_node, tdip_start)
from maintflow.timegrid import Discretization, GridError, release_deadline_grid, unit_grid

from conftest import sched, small_params


def solve(model, inst=None):
    hook = ctip_rounding(inst) if inst is not None and model.meta.get("kind") == "ctip" else None
    return solve_milp(model, heuristic=hook)


def random_schedule(inst, rng, denominator=2):
    return Schedule({j.arc: j.release + F(rng.randint(0, int((j.latest_start - j.release) * denominator)),
                                          denominator) for j in inst.jobs})


# --- continuous-time model


def test_ctip_size(example1):
    m = build_ctip(example1)
    assert m.meta["M"] == 9
    assert len(m.binaries()) == 2 * 4 * 9


@pytest.mark.parametrize("storage, value, start_a", [(None, 1, 0), (2, 2, 1)])
def test_ctip_fig1(storage, value, start_a):
    from maintflow.catalog import two_arc_instance
    inst = two_arc_instance(storage)
    m = build_ctip(inst)
    res = solve(m, inst)
    assert res.status == OPTIMAL and res.objective == value
    s = extract_schedule(inst, m, res)
    assert s["a"] == start_a
    assert evaluate_value(inst, s) == value


def test_ctip_example1(example1):
    m = build_ctip(example1)
    res = solve(m, example1)
    assert res.objective == 16
    assert extract_schedule(example1, m, res)["a"] == F(3, 2)


def test_ctip_without_heuristic_agrees(fig1):
    m = build_ctip(fig1)
    assert solve_milp(m).objective == solve(m, fig1).objective == 1


def test_ctip_assignment_is_feasible_and_exact():
    rng = random.Random(5)
    for seed in range(15):
        inst = generate_instance(seed, small_params(jobs=3, storage_nodes=seed % 2))
        m = build_ctip(inst)
        s = random_schedule(inst, rng, 3)
        full = ctip_full_assignment(inst, s)
        assert m.check(full) == []
        assert m.evaluate(full) == evaluate_value(inst, s)
        # the binaries and breakpoints alone admit nothing better than the schedule's value
        ws = warm_start(m, ctip_start(inst, s))
        assert ws.value == evaluate_value(inst, s)
        assert extract_schedule(inst, m, full) == s


def test_ctip_assignment_keys(fig1):
    a = ctip_assignment(fig1, sched(a=1, b=0))
    assert [a[f"t[{i}]"] for i in range(6)] == [0, 0, 1, 1, 3, 3]
    # b is shut over [t0, t3] and starts at t0; a starts at t2 = 1
    assert [a[f"w[b,{i}]"] for i in range(1, 6)] == [1, 1, 1, 0, 0]
    assert a["z[b,1]"] == 1 and a["z[a,3]"] == 1 and a["w[a,2]"] == 0


# --- fixed-grid models


def test_interval_sets_on_example1(example1):
    sets = interval_sets(example1, release_deadline_grid(example1))
    # grid 0,3,5,6,7: job a (r=0, d=5, p=3) may start in [0, 2]
    assert sets.S["a"] == (1,)
    assert sets.T["a"] == (1, 2)
    assert sets.Q["a", 1] == (1, 2)


def test_tdip_is_a_relaxation_of_every_schedule():
    rng = random.Random(9)
    for seed in range(12):
        inst = generate_instance(seed, small_params(jobs=3, storage_nodes=seed % 2))
        for grid in (release_deadline_grid(inst), unit_grid(inst)):
            m = build_tdip(inst, grid)
            s = random_schedule(inst, rng, 4)
            ws = warm_start(m, tdip_start(inst, grid, s))
            assert ws.value >= evaluate_value(inst, s)


def test_tdip_lb_is_exact_on_breakpoint_schedules():
    rng = random.Random(13)
    for seed in range(12):
        inst = generate_instance(seed, small_params(jobs=3, storage_nodes=seed % 2))
        grid = unit_grid(inst)
        m = build_tdip_lb(inst, grid)
        s = random_schedule(inst, rng, 1)
        start = tdip_start(inst, grid, s, lower=True)
        ws = warm_start(m, start)
        assert ws.value == evaluate_value(inst, s)
        assert extract_schedule(inst, m, ws.assignment) == s


def test_tdip_values(fig1, fig1_storage, example1):
    for inst, opt in ((fig1, 1), (fig1_storage, 2), (example1, 16)):
        for grid in (release_deadline_grid(inst), unit_grid(inst)):
            assert solve(build_tdip(inst, grid)).objective >= opt
    assert solve(build_tdip_lb(fig1, unit_grid(fig1))).objective == 1
    assert solve(build_tdip_lb(fig1_storage, unit_grid(fig1_storage))).objective == 2
    res = solve(build_tdip_lb(example1, unit_grid(example1)))
    assert res.objective == 15


def test_tdip_lb_needs_conformal_grid(example1):
    with pytest.raises(GridError):
        build_tdip_lb(example1, release_deadline_grid(example1))


def test_tdip_start_errors(example1):
    grid = unit_grid(example1)
    with pytest.raises(GridError):
        tdip_start(example1, grid, sched(a=F(3, 2), b=3, c=0, d=0), lower=True)


def test_zvector_extraction(example1):
    grid = unit_grid(example1)
    m = build_tdip_lb(example1, grid)
    res = solve(m)
    z = extract_zvector(example1, m, res)
    for j in example1.jobs:
        assert z.mass(j.arc) == j.processing
    with pytest.raises(ModelError):
        extract_zvector(example1, build_ctip(example1), res.assignment)


# --- side constraints


def test_precedence_continuous_time(fig1_storage):
    m = add_precedence(build_ctip(fig1_storage), fig1_storage, "b", "a")
    res = solve(m)
    assert res.objective == 2
    s = extract_schedule(fig1_storage, m, res)
    assert s["b"] + 1 <= s["a"]
    impossible = add_precedence(build_ctip(fig1_storage), fig1_storage, "a", "b")
    assert solve(impossible).status == INFEASIBLE


def test_precedence_on_grid(fig1_storage):
    grid = unit_grid(fig1_storage)
    m = add_precedence(build_tdip_lb(fig1_storage, grid), fig1_storage, "b", "a")
    res = solve(m)
    s = extract_schedule(fig1_storage, m, res)
    assert s["b"] + 1 <= s["a"] and res.objective == 2
    assert solve(add_precedence(build_tdip(fig1_storage, grid), fig1_storage, "a", "b")).status == INFEASIBLE
    with pytest.raises(ModelError):
        add_precedence(build_ctip(fig1_storage), fig1_storage, "a", "a")


def test_incompatibility(fig1, fig1_storage):
    # the two jobs may not overlap, so job a cannot start before 1
    assert solve(add_incompatibility(build_ctip(fig1), fig1, ["a", "b"])).objective == 0
    assert solve(add_incompatibility(build_ctip(fig1_storage), fig1_storage, ["a", "b"])).objective == 2
    lb = add_incompatibility(build_tdip_lb(fig1, unit_grid(fig1)), fig1, ["a", "b"])
    assert solve(lb).objective == 0
    with pytest.raises(ModelError):
        add_incompatibility(build_ctip(fig1), fig1, ["a"])


def test_split_node_structure(fig1_storage):
    inst = split_node(fig1_storage, "v", "both", job=(0, 3, 1))
    net = inst.network
    assert net.nodes == ("s", "v'", "v''", "v'''", "t")
    assert net.storage == {"v''": 2}
    assert net.arc("a").head == "v'" and net.arc("b").tail == "v'''"
    assert net.arc("v:in").cap == 1 == net.arc("v:out").cap
    assert inst.simultaneous == (("v:in", "v:out"),)
    plain = split_node(fig1_storage.without_storage(), "v", job=(0, 3, 1))
    assert plain.network.nodes == ("s", "v'", "v''", "t")
    assert [j.arc for j in plain.jobs] == ["a", "b", "v:in"]


def test_split_node_simultaneous_jobs(fig1_storage):
    from maintflow.exact import grid_oracle
    inst = split_node(fig1_storage, "v", "both", job=(0, 3, 1))
    grid = unit_grid(inst)
    lb = build_tdip_lb(inst, grid)
    res = solve(lb)
    s = extract_schedule(inst, lb, res)
    assert s["v:in"] == s["v:out"]
    # on the unit grid the lower-bound model sees exactly the integer starts
    assert res.objective == evaluate_value(inst, s) == grid_oracle(inst, 1)[1]
    m = build_ctip(inst)
    ct = solve_milp(m, node_limit=100, start=ctip_start(inst, s), heuristic=ctip_rounding(inst))
    s2 = extract_schedule(inst, m, ct)
    assert s2["v:in"] == s2["v:out"]
    assert ct.objective == evaluate_value(inst, s2) >= res.objective
    with pytest.raises(ModelError):
        add_simultaneous(build_tdip(fig1_storage, unit_grid(fig1_storage)), fig1_storage, "a", "b")
