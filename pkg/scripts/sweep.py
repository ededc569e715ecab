#!/usr/bin/env python3
"""Full-budget sweep over scenarios, modes, seeds and optimizers.

Writes one results CSV per run plus summary.csv. On a single slow core a
d = 50 run takes about 20 s; d = 200 runs take several minutes each.

    python scripts/sweep.py --out runs/ --scenarios 1-15 --seeds 1,2,3 --jobs 4
"""

from __future__ import annotations

import argparse
import csv
import math
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from gmpb.harness import create_session, export_results, fmt
from gmpb.optimizer import grouping_for, run_cc_mpso, run_mpso, run_random_search
from gmpb.scenario import scenario_config, start_run


def parse_ids(text: str) -> list[int]:
    ids: list[int] = []
    for part in text.split(","):
        lo, _, hi = part.partition("-")
        ids.extend(range(int(lo), int(hi or lo) + 1))
    return ids


def one_run(job):
    sid, mode, seed, optimizer, out_dir, environments = job
    cfg = scenario_config(sid, mode, seed)
    if environments:
        import dataclasses

        cfg = dataclasses.replace(cfg, environments=environments)
    prob, rng = start_run(cfg)
    session = create_session(prob, cfg, rng)
    started = time.perf_counter()
    if optimizer == "random":
        result = run_random_search(session, rng)
    elif optimizer == "mpso":
        result = run_mpso(session, rng=rng)
    else:
        result = run_cc_mpso(session, grouping_for(prob, "oracle"), rng=rng)
    path = Path(out_dir) / f"{cfg.label}_{mode}_{optimizer}_s{seed}.csv"
    export_results(session, path, optimizer=optimizer)
    finite = all(math.isfinite(r.best_fitness) for r in result.records)
    return cfg.label, mode, seed, optimizer, result.e_bbc, finite, time.perf_counter() - started


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("runs"))
    ap.add_argument("--scenarios", default="1-15")
    ap.add_argument("--modes", default="default,challenging")
    ap.add_argument("--seeds", default="1,2,3")
    ap.add_argument("--optimizers", default="random,mpso,ccmpso")
    ap.add_argument("--environments", type=int, default=None, help="shorten runs for smoke tests")
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()

    args.out.mkdir(parents=True, exist_ok=True)
    jobs = [
        (sid, mode, seed, opt, str(args.out), args.environments)
        for sid in parse_ids(args.scenarios)
        for mode in args.modes.split(",")
        for seed in parse_ids(args.seeds)
        for opt in args.optimizers.split(",")
    ]
    rows = []
    with ProcessPoolExecutor(max_workers=args.jobs) as pool:
        for row in pool.map(one_run, jobs):
            label, mode, seed, opt, value, finite, secs = row
            print(f"{label:>4} {mode:<11} seed={seed:<3} {opt:<7} E_BBC={fmt(value)} finite={finite} {secs:.1f}s", flush=True)
            rows.append(row)
    with open(args.out / "summary.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["scenario", "mode", "seed", "optimizer", "e_bbc", "finite", "seconds"])
        for label, mode, seed, opt, value, finite, secs in rows:
            w.writerow([label, mode, seed, opt, fmt(value), finite, f"{secs:.2f}"])
    bad = [r for r in rows if not (r[5] and math.isfinite(r[4]))]
    print(f"{len(rows)} runs, {len(bad)} with non-finite values")


if __name__ == "__main__":
    main()
