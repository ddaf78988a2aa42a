"""Command-line interface: ``maintflow <subcommand> ...``.

Exit status: 0 on success, 2 when the input is invalid or infeasible (bad
JSON, invalid instance, infeasible schedule, unusable grid, enumeration over
budget), 1 on any other error.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import bench
from .bounds import bound_lb, bound_ub, solve_ctip
from .core import (GeneratorParams, InfeasibleScheduleError, InstanceError, format_rational, generate_instance,
                   load_instance, load_schedule, require_feasible, save_instance, schedule_to_dict,
                   validate_instance)
from .evaluator import evaluate_schedule
from .exact import DEFAULT_BUDGET, BudgetExceeded, exact_search_no_storage, grid_oracle
from .heuristics import heuristic_pipeline
from .milp import WarmStartError
from .timegrid import GridError, grid_from_selector, is_conformal

EXIT_OK, EXIT_INTERNAL, EXIT_INPUT = 0, 1, 2
INPUT_ERRORS = (InstanceError, InfeasibleScheduleError, GridError, BudgetExceeded, WarmStartError,
                json.JSONDecodeError, FileNotFoundError)


def _positive(kind):
    def parse(text):
        value = kind(text)
        if value <= 0:
            raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
        return value
    return parse


def _rational(text):
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def _emit(payload: dict, out) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    print(text)


def _fmt(x):
    return None if x is None else format_rational(x)


def _grid(args, inst):
    if args.grid == "file" and not args.grid_file:
        raise GridError("--grid file needs --grid-file")
    return grid_from_selector(inst, args.grid, args.grid_file)


def _limits(args):
    return {"time_limit": args.time_limit, "node_limit": args.node_limit}


def cmd_generate(args) -> int:
    params = GeneratorParams(nodes=args.nodes, arcs=args.arcs, jobs=args.jobs, horizon=args.horizon,
                             storage_nodes=args.storage_nodes)
    out = Path(args.out) if args.out else None
    if out:
        out.mkdir(parents=True, exist_ok=True)
    for k in range(args.count):
        inst = generate_instance(args.seed + k, params)
        if out:
            save_instance(inst, out / f"inst_{args.seed + k:04d}.json")
        else:
            from .core import dumps_instance
            print(dumps_instance(inst))
    if out:
        print(f"wrote {args.count} instance(s) to {out}")
    return EXIT_OK


def cmd_validate(args) -> int:
    with open(args.instance, encoding="utf-8") as fh:
        data = json.load(fh)
    from .core import instance_from_dict
    try:
        inst = instance_from_dict(data)
    except InstanceError as exc:
        print(f"invalid: {exc}")
        return EXIT_INPUT
    problems = validate_instance(inst)
    if args.schedule:
        sched = load_schedule(args.schedule)
        try:
            require_feasible(inst, sched)
        except InfeasibleScheduleError as exc:
            problems.append(str(exc))
    if problems:
        for p in problems:
            print(f"invalid: {p}")
        return EXIT_INPUT
    print("ok")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    inst = load_instance(args.instance)
    sol = evaluate_schedule(inst, load_schedule(args.schedule))
    if args.out:
        Path(args.out).write_text(json.dumps(sol.to_dict(), indent=2) + "\n", encoding="utf-8")
    print(format_rational(sol.value))
    return EXIT_OK


def cmd_solve_exact(args) -> int:
    inst = load_instance(args.instance)
    sched, value = exact_search_no_storage(inst, budget=args.budget)
    _emit({"method": "exact-search", "schedule": schedule_to_dict(sched), "value": _fmt(value)}, args.out)
    return EXIT_OK


def cmd_oracle(args) -> int:
    inst = load_instance(args.instance)
    sched, value = grid_oracle(inst, args.step, budget=args.budget)
    _emit({"method": "grid-oracle", "step": _fmt(args.step), "schedule": schedule_to_dict(sched),
           "value": _fmt(value)}, args.out)
    return EXIT_OK


def _bound_payload(res, **extra) -> dict:
    out = {"method": res.method, "status": res.status, "value": _fmt(res.value), "bound": _fmt(res.bound),
           "lp_bound": _fmt(res.lp_bound), "nodes": res.nodes}
    if res.schedule is not None:
        out["schedule"] = schedule_to_dict(res.schedule)
    out.update(extra)
    return out


def cmd_solve_ctip(args) -> int:
    inst = load_instance(args.instance)
    res = solve_ctip(inst, **_limits(args))
    _emit(_bound_payload(res), args.out)
    return EXIT_OK


def cmd_bound_ub(args) -> int:
    inst = load_instance(args.instance)
    res = bound_ub(inst, _grid(args, inst), **_limits(args), label=f"TDIP({args.grid})")
    _emit(_bound_payload(res), args.out)
    return EXIT_OK


def cmd_bound_lb(args) -> int:
    inst = load_instance(args.instance)
    grid = _grid(args, inst)
    res = bound_lb(inst, grid, **_limits(args), label=f"TDIP-LB({args.grid})")
    note = None
    if res.optimal and not inst.has_storage and inst.is_integral and args.grid == "unit":
        note = "optimal for the instance: integer data without storage has an integral optimal schedule"
    _emit(_bound_payload(res, note=note), args.out)
    return EXIT_OK


def cmd_heur(args) -> int:
    inst = load_instance(args.instance)
    grid = _grid(args, inst)
    if args.node_limit is not None:
        report = heuristic_pipeline(inst, grid, tau_nodes=args.node_limit)
    else:
        report = heuristic_pipeline(inst, grid, tau_seconds=args.snapshots or 10.0)
    _emit({"runs": [r.to_dict() for r in report.runs], "best": report.best.to_dict(),
           "missing": report.missing, "upper_bound": _fmt(report.upper_bound),
           "lp_bound": _fmt(report.lp_bound)}, args.out)
    return EXIT_OK


def bench_instance(name: str, inst, node_limit: int | None, time_limit: float | None) -> list:
    """Bound records for one instance: LP and MIP upper bounds, model and heuristic lower bounds."""
    recs = []
    lim = {"node_limit": node_limit, "time_limit": time_limit}
    grids = {"RD": grid_from_selector(inst, "rd")}
    if inst.is_integral:
        grids["TI"] = grid_from_selector(inst, "unit")
    for gname, grid in grids.items():
        res = bound_ub(inst, grid, **lim)
        recs.append(bench.BoundRecord(name, f"LP-TDIP({gname})", bench.UPPER, res.lp_bound, res.elapsed, "root"))
        recs.append(bench.BoundRecord(name, f"UB-TDIP({gname})", bench.UPPER, res.bound, res.elapsed, res.status))
    ctip = solve_ctip(inst, **lim)
    recs.append(bench.BoundRecord(name, "LP-CTIP", bench.UPPER, ctip.lp_bound, ctip.elapsed, "root"))
    recs.append(bench.BoundRecord(name, "UB-CTIP", bench.UPPER, ctip.bound, ctip.elapsed, ctip.status))
    if ctip.value is not None:
        recs.append(bench.BoundRecord(name, "LB-CTIP", bench.LOWER, ctip.value, ctip.elapsed, ctip.status))
    if "TI" in grids and is_conformal(inst, grids["TI"]):
        lb = bound_lb(inst, grids["TI"], **lim)
        if lb.value is not None:
            recs.append(bench.BoundRecord(name, "LB1", bench.LOWER, lb.value, lb.elapsed, lb.status))
    tau = {"tau_nodes": node_limit} if node_limit is not None else {"tau_seconds": time_limit or 10.0}
    rep = heuristic_pipeline(inst, grids["RD"], **tau)
    for run in rep.runs:
        recs.append(bench.BoundRecord(name, run.label.split("τ")[0], bench.LOWER, run.value, 0.0, run.source))
    return recs


def cmd_bench(args) -> int:
    files = sorted(Path(args.instances).glob("*.json"))
    if not files:
        raise InstanceError(f"no instance files in {args.instances}")
    records = []
    for path in files:
        records += bench_instance(path.stem, load_instance(path), args.node_limit, args.time_limit)
    if not args.timings:
        records = [dataclasses.replace(r, runtime=None) for r in records]
    out = Path(args.out) if args.out else Path(".")
    out.mkdir(parents=True, exist_ok=True)
    bench.report(records, "csv", out / "bounds.csv")
    bench.report(records, "md", out / "bounds.md")
    profiles = {}
    for kind in (bench.UPPER, bench.LOWER):
        try:
            profiles[kind] = bench.profiles_to_dict(bench.profiles_from_records(records, kind))
        except bench.BenchError as exc:
            profiles[kind] = {"error": str(exc)}
    (out / "profiles.json").write_text(json.dumps(profiles, indent=2) + "\n", encoding="utf-8")
    print(f"{len(records)} bound records for {len(files)} instance(s) written to {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="maintflow", description="Arc maintenance scheduling for flows over time.")
    sub = ap.add_subparsers(dest="command", required=True)

    def limits(p):
        p.add_argument("--time-limit", type=_positive(float), help="seconds")
        p.add_argument("--node-limit", type=_positive(int), help="LP solves, root included")

    def grid(p, default):
        p.add_argument("--grid", choices=("rd", "unit", "conformal", "file"), default=default)
        p.add_argument("--grid-file", help="JSON list of breakpoints, used with --grid file")

    p = sub.add_parser("generate", help="write random instances")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=_positive(int), default=1)
    p.add_argument("--nodes", type=int, default=5)
    p.add_argument("--arcs", type=int, default=7)
    p.add_argument("--jobs", type=int, default=3)
    p.add_argument("--horizon", type=int, default=10)
    p.add_argument("--storage-nodes", type=int, default=0)
    p.add_argument("--out", help="directory (default: print to stdout)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("validate", help="check an instance (and optionally a schedule)")
    p.add_argument("instance")
    p.add_argument("schedule", nargs="?")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("evaluate", help="total flow of a schedule")
    p.add_argument("instance")
    p.add_argument("schedule")
    p.add_argument("--out", help="write the flow solution as JSON")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("solve-exact", help="exact search over candidate starts (no storage)")
    p.add_argument("instance")
    p.add_argument("--budget", type=_positive(int), default=DEFAULT_BUDGET)
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve_exact)

    p = sub.add_parser("oracle", help="brute force over a uniform start grid")
    p.add_argument("instance")
    p.add_argument("--step", type=_rational, default=Fraction(1))
    p.add_argument("--budget", type=_positive(int), default=DEFAULT_BUDGET)
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("solve-ctip", help="continuous-time model")
    p.add_argument("instance")
    limits(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve_ctip)

    p = sub.add_parser("bound-ub", help="fixed-grid upper bound")
    p.add_argument("instance")
    grid(p, "rd")
    limits(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bound_ub)

    p = sub.add_parser("bound-lb", help="conformal-grid lower bound")
    p.add_argument("instance")
    grid(p, "unit")
    limits(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bound_lb)

    p = sub.add_parser("heur", help="Projection and Centre-of-Mass heuristics")
    p.add_argument("instance")
    grid(p, "rd")
    p.add_argument("--node-limit", type=_positive(int), help="snapshot after this many LPs (deterministic)")
    p.add_argument("--snapshots", type=_positive(float), help="snapshot time in seconds (default 10)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_heur)

    p = sub.add_parser("bench", help="bound all instances in a directory and report gaps")
    p.add_argument("instances", help="directory of instance JSON files")
    limits(p)
    p.add_argument("--timings", action="store_true",
                   help="fill the runtime column (off by default so node-limited runs are reproducible)")
    p.add_argument("--out", help="output directory (default: current)")
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "bench" and args.node_limit is None and args.time_limit is None:
        args.node_limit = 200
    try:
        return args.func(args)
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001 - reported, mapped to the internal-error status
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
