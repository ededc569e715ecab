#!/usr/bin/env python3
"""Seed-averaged E_BBC for random search, MPSO and CC-MPSO on chosen scenarios.

    python scripts/compare_optimizers.py --scenarios 2,4 --seeds 1-5
"""

from __future__ import annotations

import argparse
import statistics

from gmpb.harness import create_session
from gmpb.optimizer import grouping_for, run_cc_mpso, run_mpso, run_random_search
from gmpb.scenario import scenario_config, start_run

RUNNERS = {
    "random": lambda s, p, r: run_random_search(s, r),
    "mpso": lambda s, p, r: run_mpso(s, rng=r),
    "ccmpso": lambda s, p, r: run_cc_mpso(s, grouping_for(p, "oracle"), rng=r),
    "ccmpso-separable": lambda s, p, r: run_cc_mpso(s, grouping_for(p, "separable"), rng=r, name="ccmpso-separable"),
}


def ids(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        lo, _, hi = part.partition("-")
        out.extend(range(int(lo), int(hi or lo) + 1))
    return out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scenarios", default="2,4")
    ap.add_argument("--seeds", default="1-5")
    ap.add_argument("--mode", default="default")
    ap.add_argument("--optimizers", default="random,mpso,ccmpso")
    args = ap.parse_args()

    for sid in ids(args.scenarios):
        print(f"f{sid} ({args.mode})")
        for name in args.optimizers.split(","):
            values = []
            for seed in ids(args.seeds):
                cfg = scenario_config(sid, args.mode, seed)
                prob, rng = start_run(cfg)
                values.append(RUNNERS[name](create_session(prob, cfg, rng), prob, rng).e_bbc)
            sd = statistics.stdev(values) if len(values) > 1 else 0.0
            print(f"  {name:<17} {statistics.fmean(values):9.4f} +/- {sd:7.4f}   {' '.join(f'{v:.3f}' for v in values)}")


if __name__ == "__main__":
    main()
