#!/usr/bin/env python3
"""Phase-transition sweep over (rank, sampling rate) cells.

Desk-scale by default; pass --full for the complete 10 x 20 grid at 50
trials per cell (hours of compute).

Example:
    python scripts/run_phase_grid.py --pattern 1 --jobs 2 --out-dir results/
"""

import argparse
import dataclasses
import json
import os
import time

import numpy as np

from tidt.experiments import PhaseGridSpec, run_phase_transition
from tidt.solver import SolverConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--pattern", choices=["1", "2", "3", "bernoulli"], default="1")
    ap.add_argument("--trials", type=int, default=None,
                    help="trials per cell (default: 4 desk-scale, 50 with --full)")
    ap.add_argument("--full", action="store_true",
                    help="full 10x20 grid at 50 trials per cell")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=int(os.environ.get("TIDT_JOBS", "1")))
    ap.add_argument("--out-dir", default="phase_results")
    args = ap.parse_args()

    pattern = "bernoulli" if args.pattern == "bernoulli" else f"pattern{args.pattern}"
    if args.full:
        spec = PhaseGridSpec(pattern=pattern, trials=args.trials or 50, seed=args.seed)
    else:
        spec = PhaseGridSpec(
            rank_values=(2, 6, 10, 14, 18),
            rho_values=tuple(i / 21 for i in (2, 6, 10, 14, 18)),
            pattern=pattern, trials=args.trials or 4, seed=args.seed)
    cfg = SolverConfig(k=spec.t, lam=1e10, track_objective=False)

    os.makedirs(args.out_dir, exist_ok=True)
    t0 = time.time()
    grid, records = run_phase_transition(spec, cfg, jobs=args.jobs)
    wall = time.time() - t0

    tag = f"{pattern}_t{spec.t}"
    grid_path = os.path.join(args.out_dir, f"grid_{tag}.csv")
    with open(grid_path, "w", encoding="utf-8") as fh:
        fh.write("rank," + ",".join(f"{r:.17g}" for r in spec.rho_values) + "\n")
        for ri, rank in enumerate(spec.rank_values):
            fh.write(f"{rank}," + ",".join(str(v) for v in grid[ri]) + "\n")
    rec_path = os.path.join(args.out_dir, f"records_{tag}.json")
    with open(rec_path, "w", encoding="utf-8") as fh:
        json.dump({"spec": dataclasses.asdict(spec),
                   "solver_config": dataclasses.asdict(cfg),
                   "records": [dataclasses.asdict(r) for r in records]}, fh, indent=2)

    print(f"{wall:.0f}s; success grid (rows=rank asc, cols=rho asc):")
    print(np.array(grid))
    print(f"wrote {grid_path} and {rec_path}")


if __name__ == "__main__":
    main()
