"""Command line: gen, run, grid, report.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import statistics
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import advance_environment
from .harness import BudgetExhausted, create_session, export_results, fmt, read_results
from .landscape import PackedProblem, optimum_position, problem_optimum_value, promising_region_count, region_count_report
from .optimizer import CC_DEFAULTS, SwarmParams, grouping_for, run_cc_mpso, run_mpso, run_random_search
from .scenario import ConfigError, ScenarioConfig, load_config, parse_scenario_id, save_config, scenario_config, start_run


class UsageError(Exception):
    pass


def _add_scenario_flags(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group()
    src.add_argument("--scenario", help="f1..f15")
    src.add_argument("--config", type=Path, help="scenario config JSON (from `gen` or hand written)")
    p.add_argument("--mode", choices=("default", "challenging"), default=None)
    p.add_argument("--seed", type=int, default=None, help="decimal 64-bit seed")
    p.add_argument("--output", "-o", type=Path, default=None)


def _resolve_config(args) -> ScenarioConfig:
    if args.config is not None:
        cfg = load_config(args.config)
        overrides = {}
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.mode is not None and args.mode != cfg.mode:
            raise UsageError("--mode cannot change the mode of a config file")
        return dataclasses.replace(cfg, **overrides) if overrides else cfg
    if args.scenario is None:
        raise UsageError("one of --scenario or --config is required")
    try:
        sid = parse_scenario_id(args.scenario)
    except ConfigError as exc:
        raise UsageError(str(exc)) from None
    seed = 0 if args.seed is None else args.seed
    if not 0 <= seed < 2**64:
        raise UsageError("--seed must be a 64-bit unsigned integer")
    return scenario_config(sid, args.mode or "default", seed)


def _header(cfg: ScenarioConfig, **extra) -> str:
    lines = [f"# tool=gmpb {__version__}", f"# seed={cfg.seed}", f"# scenario={cfg.label}", f"# mode={cfg.mode}"]
    lines += [f"# {k}={v}" for k, v in extra.items()]
    return "\n".join(lines) + "\n"


def cmd_gen(args) -> int:
    cfg = _resolve_config(args)
    prob, _ = start_run(cfg)
    count = promising_region_count(prob)
    _, saturated = region_count_report(prob)
    out = args.output or Path(f"{cfg.label}_{cfg.mode}_s{cfg.seed}.json")
    save_config(cfg, out)
    print(f"scenario {cfg.label} ({cfg.mode}), seed {cfg.seed}")
    print(f"  d = {cfg.dimension}")
    print(f"  groups = {list(cfg.groups)} + {cfg.separable_count} separable")
    print(f"  sub-functions = {len(prob.sub_functions)}")
    print(f"  M = {count}{' (exceeds 2^64-1)' if saturated else ''}")
    print(f"  change period = {cfg.change_period}")
    print(f"  environments = {cfg.environments}")
    for note in cfg.notes:
        print(f"  note: {note}")
    print(f"wrote {out}")
    return 0


def _swarm_params(args, base: SwarmParams) -> SwarmParams:
    values = {}
    if args.params is not None:
        try:
            data = json.loads(Path(args.params).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise UsageError(f"{args.params}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
        known = {f.name for f in dataclasses.fields(SwarmParams)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise UsageError(f"{args.params}: unknown parameter(s): {', '.join(unknown)}")
        values.update(data)
    for flag, name in (("population", "population"), ("swarms", "swarm_count"), ("iterations", "max_iterations")):
        if getattr(args, flag) is not None:
            values[name] = getattr(args, flag)
    try:
        return dataclasses.replace(base, **values)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_run(args) -> int:
    cfg = _resolve_config(args)
    if args.environments is not None:
        cfg = dataclasses.replace(cfg, environments=args.environments)
    prob, rng = start_run(cfg)
    session = create_session(prob, cfg, rng, signal_changes=args.signal_changes)
    name = args.optimizer
    if name == "random":
        result = run_random_search(session, rng)
    elif name == "mpso":
        result = run_mpso(session, _swarm_params(args, SwarmParams()), rng)
    else:
        groups = grouping_for(prob, args.grouping)
        result = run_cc_mpso(session, groups, _swarm_params(args, CC_DEFAULTS), rng)
        name = f"ccmpso-{args.grouping}"
    out = args.output or Path(f"results_{cfg.label}_{cfg.mode}_{name}_s{cfg.seed}.csv")
    export_results(session, out, optimizer=name)
    print(f"E_BBC={fmt(result.e_bbc)}")
    print(f"evaluations={session.evaluations_used} environments={len(session.records)} wrote {out}", file=sys.stderr)
    return 0


def cmd_grid(args) -> int:
    cfg = _resolve_config(args)
    try:
        p, q = (int(v) for v in args.dims.split(","))
    except ValueError:
        raise UsageError(f"--dims expects two comma-separated indices, got {args.dims!r}") from None
    d = cfg.dimension
    if d < 2 or p == q or not (0 <= p < d and 0 <= q < d):
        raise UsageError(f"--dims {args.dims}: need two distinct indices in [0, {d - 1}]")
    if args.resolution < 2:
        raise UsageError("--resolution must be at least 2")
    if args.env < 0:
        raise UsageError("--env must be nonnegative")
    prob, rng = start_run(cfg)
    for _ in range(args.env):
        prob = advance_environment(prob, rng)
    rows = grid_samples(prob, p, q, args.resolution)
    out = args.output or Path(f"grid_{cfg.label}_{cfg.mode}_s{cfg.seed}_e{args.env}_{p}_{q}.csv")
    buf = io.StringIO()
    buf.write(
        _header(
            cfg,
            environment=args.env,
            dims=f"{p},{q}",
            resolution=args.resolution,
            fixed="other coordinates at the tallest component center of each sub-function",
            optimum=fmt(problem_optimum_value(prob)),
        )
    )
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"x_{p}", f"x_{q}", "F"])
    for a, b, f in rows:
        w.writerow([fmt(a), fmt(b), fmt(f)])
    out.write_text(buf.getvalue(), encoding="utf-8")
    print(f"wrote {len(rows)} samples to {out}")
    return 0


def grid_samples(prob, p: int, q: int, resolution: int, chunk: int = 20000) -> list[tuple[float, float, float]]:
    """R x R samples over the search box in dims (p, q); row-major in x_p."""
    axis = np.linspace(prob.bounds.lo, prob.bounds.hi, resolution)
    xp, xq = np.meshgrid(axis, axis, indexing="ij")
    X = np.repeat(optimum_position(prob)[None, :], xp.size, axis=0)
    X[:, p] = xp.ravel()
    X[:, q] = xq.ravel()
    packed = PackedProblem(prob)
    F = np.concatenate([packed.evaluate(X[i : i + chunk]) for i in range(0, len(X), chunk)])
    return list(zip(X[:, p].tolist(), X[:, q].tolist(), F.tolist()))


def cmd_report(args) -> int:
    rows = []
    failed = []
    for path in args.files:
        try:
            meta, records = read_results(path)
            if not records:
                raise ValueError("no environment records")
        except (OSError, ValueError) as exc:
            failed.append((path, str(exc)))
            continue
        value = math.fsum(r.error for r in records) / len(records)
        rows.append((str(path), meta.get("scenario", "?"), meta.get("mode", "?"), meta.get("optimizer", "?"),
                     meta.get("seed", "?"), len(records), value))
    for path, why in failed:
        print(f"skipped {path}: {why}", file=sys.stderr)
    if not rows:
        print("no readable result files", file=sys.stderr)
        return 1
    values = [r[-1] for r in rows]
    mean = statistics.fmean(values)
    std = statistics.stdev(values) if len(values) > 1 else 0.0
    headers = ("file", "scenario", "mode", "optimizer", "seed", "envs", "E_BBC")
    table = [headers] + [r[:-1] + (fmt(r[-1]),) for r in rows]
    widths = [max(len(str(row[i])) for row in table) for i in range(len(headers))]
    for row in table:
        print("  ".join(str(c).ljust(w) for c, w in zip(row, widths)).rstrip())
    print(f"mean E_BBC = {fmt(mean)} +/- {fmt(std)} (n={len(values)})")
    if args.csv is not None:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(headers)
            for r in rows:
                w.writerow(r[:-1] + (fmt(r[-1]),))
            fh.write(f"# mean={fmt(mean)}\n# std={fmt(std)}\n# n={len(values)}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gmpb", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"gmpb {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="build a scenario and write its config")
    _add_scenario_flags(gen)
    gen.set_defaults(func=cmd_gen)

    run = sub.add_parser("run", help="run an optimizer for the whole budget")
    _add_scenario_flags(run)
    run.add_argument("--optimizer", choices=("random", "mpso", "ccmpso"), default="mpso")
    run.add_argument("--grouping", choices=("oracle", "single", "separable"), default="oracle")
    run.add_argument("--signal-changes", action="store_true", help="let the optimizer see change times")
    run.add_argument("--environments", type=int, default=None, help="override the number of environments")
    run.add_argument("--params", type=Path, default=None, help="JSON object of swarm parameters")
    run.add_argument("--population", type=int, default=None)
    run.add_argument("--swarms", type=int, default=None)
    run.add_argument("--iterations", type=int, default=None)
    run.set_defaults(func=cmd_run)

    grid = sub.add_parser("grid", help="export a 2-D landscape slice")
    _add_scenario_flags(grid)
    grid.add_argument("--dims", default="0,1")
    grid.add_argument("--resolution", type=int, default=101)
    grid.add_argument("--env", type=int, default=0)
    grid.set_defaults(func=cmd_grid)

    report = sub.add_parser("report", help="summarize result files")
    report.add_argument("files", nargs="+", type=Path)
    report.add_argument("--csv", type=Path, default=None)
    report.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"gmpb: error: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"gmpb: config error: {exc}", file=sys.stderr)
        return 2
    except (BudgetExhausted, OSError, ValueError) as exc:
        print(f"gmpb: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
