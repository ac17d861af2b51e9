"""Command-line front end: recovery runs, mask generation, theory analysis,
metrics, experiment sweeps and tensor file I/O.

Exit codes: 0 success, 1 usage or data error (single-line diagnostic on
stderr), 2 completed without convergence (output still written).
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import os
import sys
import tempfile

import numpy as np

from .experiments import PhaseGridSpec, mae, rmse, run_phase_transition, run_scaling_bench
from .hankel import HankelConfig
from .sampling import (
    SamplingMask,
    gen_bernoulli,
    gen_pattern,
    gen_prediction,
    min_temporal_sampling_rate,
    theory_bound,
)
from .solver import SolverConfig, admm_solve
from .t_algebra import TransformSpec
from .tensorfile import TensorFileError, export_csv, ingest_csv, read_tensor, write_tensor

__all__ = ["main", "entry"]

_TRANSFORMS = {"dft": TransformSpec("dft"), "dct": TransformSpec("dct"),
               "rot": TransformSpec("rot")}


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_text_atomic(path, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_json(path, doc) -> None:
    _write_text_atomic(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _parse_shape(text: str) -> tuple:
    try:
        shape = tuple(int(s) for s in text.split(","))
    except ValueError:
        raise TensorFileError(f"invalid shape {text!r}")
    if not shape or any(s < 1 for s in shape):
        raise TensorFileError(f"invalid shape {text!r}")
    return shape


def cmd_recover(args) -> int:
    y = read_tensor(args.input)
    mask = SamplingMask(read_tensor(args.mask))
    if y.shape != mask.mask.shape:
        raise TensorFileError(
            f"input shape {y.shape} does not match mask shape {mask.mask.shape}")
    cfg = SolverConfig(k=args.k, lam=args.lam, transform=_TRANSFORMS[args.transform],
                       padding=args.pad, tol=args.tol, max_iters=args.max_iters)
    x_hat, report = admm_solve(y, mask, cfg)
    write_tensor(args.out, x_hat)
    if args.truth:
        truth = read_tensor(args.truth)
        missing = 1.0 - mask.mask
        scope = missing if missing.sum() > 0 else None
        report.mae = mae(x_hat, truth, scope)
        report.rmse = rmse(x_hat, truth, scope)
        print(f"mae={report.mae:.6g} rmse={report.rmse:.6g}")
    if args.report:
        manifest = {
            "command": "recover",
            "solver_config": dataclasses.asdict(cfg),
            "inputs": {
                "input": {"path": str(args.input), "sha256": _sha256(args.input)},
                "mask": {"path": str(args.mask), "sha256": _sha256(args.mask)},
            },
            "mask_provenance": {"kind": "file", "sha256": _sha256(args.mask)},
            "output": {"path": str(args.out), "sha256": _sha256(args.out)},
            "report": {
                "iterations": report.iterations,
                "converged": report.converged,
                "final_rel_change": report.final_rel_change,
                "primal_residuals": report.primal_residuals,
                "objective_trace": report.objective_trace,
                "mae": report.mae,
                "rmse": report.rmse,
                "wall_time": report.wall_time,
            },
        }
        if args.truth:
            manifest["inputs"]["truth"] = {"path": str(args.truth),
                                           "sha256": _sha256(args.truth)}
        _write_json(args.report, manifest)
    return 0 if report.converged else 2


def cmd_mask(args) -> int:
    shape = _parse_shape(args.shape)
    if args.pattern in ("1", "2", "3"):
        if args.rate is None:
            raise TensorFileError("patterns 1/2/3 require --rate")
        mask = gen_pattern(int(args.pattern), shape, args.rate, args.seed)
    elif args.pattern == "bernoulli":
        if args.theta is None:
            raise TensorFileError("bernoulli requires --theta")
        mask = gen_bernoulli(shape, args.theta, args.seed)
    else:
        if args.horizon is None:
            raise TensorFileError("prediction requires --horizon")
        mask = gen_prediction(shape, args.horizon)
    write_tensor(args.out, mask.mask)
    print(f"rho={min_temporal_sampling_rate(mask):.6g}")
    return 0


def cmd_analyze(args) -> int:
    m = read_tensor(args.input)
    if args.mask:
        mask = SamplingMask(read_tensor(args.mask))
        if mask.mask.shape != m.shape:
            raise TensorFileError(
                f"mask shape {mask.mask.shape} does not match input {m.shape}")
    else:
        mask = SamplingMask(np.ones(m.shape))
    diag = theory_bound(m, mask, HankelConfig(args.k), alpha=args.alpha)
    print(json.dumps(diag.as_dict(), sort_keys=True))
    return 0


def cmd_simulate(args) -> int:
    ranks = tuple(int(r) for r in args.ranks.split(",")) if args.ranks else tuple(range(2, 21, 2))
    if args.rhos:
        rhos = tuple(float(r) for r in args.rhos.split(","))
    else:
        rhos = tuple(i / args.t for i in range(1, args.t))
    pattern = {"1": "pattern1", "2": "pattern2", "3": "pattern3",
               "bernoulli": "bernoulli"}[args.pattern]
    spec = PhaseGridSpec(t=args.t, n=args.n, rank_values=ranks, rho_values=rhos,
                         pattern=pattern, trials=args.trials, seed=args.seed)
    cfg = SolverConfig(k=args.k if args.k else args.t, lam=args.lam,
                       max_iters=args.max_iters, track_objective=False)
    grid, records = run_phase_transition(spec, cfg, jobs=args.jobs)
    lines = ["rank," + ",".join(f"{r:.17g}" for r in rhos)]
    for ri, rank in enumerate(ranks):
        lines.append(f"{rank}," + ",".join(str(int(v)) for v in grid[ri]))
    _write_text_atomic(args.out_grid, "\n".join(lines) + "\n")
    _write_json(args.out_records, {
        "spec": dataclasses.asdict(spec),
        "solver_config": dataclasses.asdict(cfg),
        "records": [dataclasses.asdict(rec) for rec in records],
    })
    return 0


def cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",")]
    rows = run_scaling_bench(sizes, reps=args.reps)
    lines = ["size,seconds_per_iteration"] + [f"{a},{sec:.17g}" for a, sec in rows]
    _write_text_atomic(args.out, "\n".join(lines) + "\n")
    return 0


def cmd_metrics(args) -> int:
    est = read_tensor(args.est)
    truth = read_tensor(args.truth)
    scope = None
    if args.scope == "missing":
        if not args.mask:
            raise TensorFileError("--scope missing requires --mask")
        mask = read_tensor(args.mask)
        scope = 1.0 - SamplingMask(mask).mask
    print(f"{mae(est, truth, scope)} {rmse(est, truth, scope)}")
    return 0


def cmd_ingest(args) -> int:
    shape = _parse_shape(args.shape) if args.shape else None
    arr, mask = ingest_csv(args.csv, shape=shape, time_major=args.time_major)
    write_tensor(args.out, arr)
    if mask is not None or args.mask_out:
        mask_path = args.mask_out or f"{os.path.splitext(args.out)[0]}.mask.tidt"
        write_tensor(mask_path, mask if mask is not None else np.ones(arr.shape))
        print(f"mask written to {mask_path}")
    return 0


def cmd_export(args) -> int:
    export_csv(args.out, read_tensor(args.input))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tidt",
                                description="Temporal delay-embedding tensor completion")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("recover", help="recover a masked tensor")
    r.add_argument("--input", required=True)
    r.add_argument("--mask", required=True)
    r.add_argument("--k", type=int, required=True)
    r.add_argument("--lambda", dest="lam", type=float, required=True)
    r.add_argument("--transform", choices=sorted(_TRANSFORMS), default="dft")
    r.add_argument("--pad", choices=["none", "symmetric"], default="none")
    r.add_argument("--tol", type=float, default=1e-7)
    r.add_argument("--max-iters", type=int, default=500)
    r.add_argument("--out", required=True)
    r.add_argument("--truth")
    r.add_argument("--report")
    r.set_defaults(func=cmd_recover)

    m = sub.add_parser("mask", help="generate observation masks")
    msub = m.add_subparsers(dest="mask_command", required=True)
    g = msub.add_parser("gen", help="generate a mask tensor file")
    g.add_argument("--pattern", choices=["1", "2", "3", "bernoulli", "prediction"],
                   required=True)
    g.add_argument("--shape", required=True)
    g.add_argument("--rate", type=float)
    g.add_argument("--theta", type=float)
    g.add_argument("--horizon", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_mask)

    a = sub.add_parser("analyze", help="recovery-theory diagnostics")
    a.add_argument("--input", required=True)
    a.add_argument("--k", type=int, required=True)
    a.add_argument("--mask")
    a.add_argument("--alpha", type=float, default=0.99)
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("simulate", help="experiment sweeps")
    ssub = s.add_subparsers(dest="simulate_command", required=True)
    ph = ssub.add_parser("phase", help="phase-transition grid")
    ph.add_argument("--t", type=int, default=21)
    ph.add_argument("--n", type=int, default=21)
    ph.add_argument("--pattern", choices=["1", "2", "3", "bernoulli"], default="1")
    ph.add_argument("--trials", type=int, default=50)
    ph.add_argument("--seed", type=int, default=0)
    ph.add_argument("--ranks", help="comma-separated rank values")
    ph.add_argument("--rhos", help="comma-separated sampling rates")
    ph.add_argument("--k", type=int, help="Hankel scale (default: t)")
    ph.add_argument("--lambda", dest="lam", type=float, default=1e10)
    ph.add_argument("--max-iters", type=int, default=500)
    ph.add_argument("--jobs", type=int,
                    default=int(os.environ.get("TIDT_JOBS", "1")))
    ph.add_argument("--out-grid", required=True)
    ph.add_argument("--out-records", required=True)
    ph.set_defaults(func=cmd_simulate)

    b = sub.add_parser("bench", help="per-iteration scaling benchmark")
    b.add_argument("--sizes", required=True)
    b.add_argument("--reps", type=int, default=3)
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_bench)

    me = sub.add_parser("metrics", help="MAE/RMSE between two tensor files")
    me.add_argument("--est", required=True)
    me.add_argument("--truth", required=True)
    me.add_argument("--mask")
    me.add_argument("--scope", choices=["missing", "all"], default="all")
    me.set_defaults(func=cmd_metrics)

    ing = sub.add_parser("ingest", help="CSV to tensor file")
    ing.add_argument("--csv", required=True)
    ing.add_argument("--out", required=True)
    ing.add_argument("--mask-out")
    ing.add_argument("--shape", help="reshape row-major to this shape")
    ing.add_argument("--time-major", action=argparse.BooleanOptionalAction, default=True,
                     help="rows are the time axis; --no-time-major transposes")
    ing.set_defaults(func=cmd_ingest)

    ex = sub.add_parser("export", help="tensor file to CSV (17 significant digits)")
    ex.add_argument("--input", required=True)
    ex.add_argument("--out", required=True)
    ex.set_defaults(func=cmd_export)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (TensorFileError, ValueError, OSError, KeyError) as exc:
        print(f"tidt: error: {exc}", file=sys.stderr)
        return 1
    except np.linalg.LinAlgError as exc:
        print(f"tidt: error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
