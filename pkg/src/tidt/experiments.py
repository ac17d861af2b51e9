"""Synthetic experiments: recovery phase transitions, prediction sweeps,
error metrics and the per-iteration scaling benchmark.

The synthetic generator sums the first a random harmonics per spatial fiber,
which pins the embedded tensor's rank below 2*a_max. Phase-transition sweeps
run independent trials per (rank, sampling rate) cell and mark a cell
successful when the mean RMSE over the missing entries stays below the
threshold.
"""

from __future__ import annotations

import dataclasses
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from threadpoolctl import threadpool_limits

from .sampling import SamplingMask, gen_bernoulli, gen_pattern
from .solver import SolverConfig, admm_solve

__all__ = [
    "PhaseGridSpec",
    "ExperimentRecord",
    "generate_synthetic",
    "mae",
    "rmse",
    "add_noise",
    "run_phase_transition",
    "run_scaling_bench",
]


def generate_synthetic(t: int, n: int, a_max: int, seed: int = 0) -> np.ndarray:
    """t x n x n tensor of per-fiber harmonic sums with prescribed rank.

    Fiber (i1, i2) is sum_{l=1..a} sin(2 pi l i_t / t) with a drawn uniformly
    from {1..a_max}, except the last fiber which is pinned to a_max so the
    maximal rank is always attained. Time index i_t runs 1..t.
    """
    if a_max < 1:
        raise ValueError(f"a_max must be >= 1, got {a_max}")
    rng = np.random.default_rng(seed)
    a = rng.integers(1, a_max + 1, size=(n, n))
    a[n - 1, n - 1] = a_max
    it = np.arange(1, t + 1)
    harmonics = np.sin(2.0 * np.pi * np.outer(it, np.arange(1, a_max + 1)) / t)
    partial = np.cumsum(harmonics, axis=1)  # column a-1 = sum of first a harmonics
    return partial[:, a - 1]


def _scoped(est: np.ndarray, truth: np.ndarray, scope_mask) -> np.ndarray:
    est = np.asarray(est, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if est.shape != truth.shape:
        raise ValueError(f"shape mismatch: {est.shape} vs {truth.shape}")
    diff = est - truth
    if scope_mask is None:
        return diff.ravel()
    scope = np.asarray(scope_mask, dtype=float)
    if scope.shape != est.shape:
        raise ValueError(f"scope mask shape {scope.shape} does not match {est.shape}")
    sel = diff[scope != 0.0]
    if sel.size == 0:
        raise ValueError("empty metric scope")
    return sel


def mae(est: np.ndarray, truth: np.ndarray, scope_mask=None) -> float:
    """Mean absolute error over the scoped entries (all entries if no scope)."""
    return float(np.mean(np.abs(_scoped(est, truth, scope_mask))))


def rmse(est: np.ndarray, truth: np.ndarray, scope_mask=None) -> float:
    """Root mean square error over the scoped entries."""
    return float(np.sqrt(np.mean(_scoped(est, truth, scope_mask) ** 2)))


def add_noise(x: np.ndarray, sigma: float, seed: int = 0) -> np.ndarray:
    """Add iid Gaussian noise of the given standard deviation."""
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    x = np.asarray(x, dtype=float)
    if sigma == 0.0:
        return x.copy()
    rng = np.random.default_rng(seed)
    return x + sigma * rng.standard_normal(x.shape)


@dataclass
class PhaseGridSpec:
    """Grid of (rank, sampling rate) cells; defaults follow the synthetic
    exact-recovery protocol (t = n = 21, 50 trials, success RMSE 0.01)."""

    t: int = 21
    n: int = 21
    rank_values: tuple = tuple(range(2, 21, 2))
    rho_values: tuple = tuple(i / 21 for i in range(1, 21))
    pattern: str = "pattern1"
    trials: int = 50
    success_rmse: float = 0.01
    seed: int = 0

    def __post_init__(self):
        for r in self.rank_values:
            if r < 2 or r % 2:
                raise ValueError(f"rank values must be even and >= 2, got {r}")
        if self.pattern not in ("pattern1", "pattern2", "pattern3", "bernoulli"):
            raise ValueError(f"unsupported pattern {self.pattern!r}")


@dataclass
class ExperimentRecord:
    """One grid cell: per-trial errors and the success verdict."""

    rank: int
    rho: float
    config: dict = field(default_factory=dict)
    rmse_values: list = field(default_factory=list)
    mae_values: list = field(default_factory=list)
    wall_times: list = field(default_factory=list)
    errors: list = field(default_factory=list)
    success: bool = False
    sigma: float | None = None


def _make_mask(pattern: str, shape, rho: float, seed: int) -> SamplingMask:
    if pattern == "bernoulli":
        return gen_bernoulli(shape, rho, seed)
    return gen_pattern(int(pattern[-1]), shape, rho, seed)


def _phase_trial(args):
    spec, solver_cfg, ri, ci, trial = args
    rank = spec.rank_values[ri]
    rho = spec.rho_values[ci]
    seeds = np.random.SeedSequence([spec.seed, ri, ci, trial]).generate_state(2)
    truth = generate_synthetic(spec.t, spec.n, rank // 2, int(seeds[0]))
    try:
        mask = _make_mask(spec.pattern, truth.shape, rho, int(seeds[1]))
        # small per-face SVDs gain nothing from BLAS threads; one thread per
        # trial keeps parallel sweeps from oversubscribing the machine
        with threadpool_limits(limits=1):
            x_hat, report = admm_solve(truth * mask.mask, mask, solver_cfg)
        missing = 1.0 - mask.mask
        if missing.sum() == 0:
            e_rmse = rmse(x_hat, truth)
            e_mae = mae(x_hat, truth)
        else:
            e_rmse = rmse(x_hat, truth, missing)
            e_mae = mae(x_hat, truth, missing)
        return ri, ci, trial, e_rmse, e_mae, report.wall_time, None
    except Exception as exc:  # recorded, never aborts the sweep
        return ri, ci, trial, float("inf"), float("inf"), 0.0, f"{type(exc).__name__}: {exc}"


def run_phase_transition(spec: PhaseGridSpec, solver_cfg: SolverConfig, jobs: int = 1):
    """Run the full success/failure grid.

    Returns (grid, records): grid is a len(rank_values) x len(rho_values)
    int array with 1 for success, plus one ExperimentRecord per cell.
    Deterministic for a fixed spec.seed regardless of jobs.
    """
    tasks = [(spec, solver_cfg, ri, ci, trial)
             for ri in range(len(spec.rank_values))
             for ci in range(len(spec.rho_values))
             for trial in range(spec.trials)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_phase_trial, tasks, chunksize=1))
    else:
        results = [_phase_trial(t) for t in tasks]

    cfg_snapshot = dataclasses.asdict(solver_cfg)
    records = {}
    for ri, rank in enumerate(spec.rank_values):
        for ci, rho in enumerate(spec.rho_values):
            records[(ri, ci)] = ExperimentRecord(rank=rank, rho=rho, config=dict(cfg_snapshot))
    for ri, ci, trial, e_rmse, e_mae, wall, err in results:
        rec = records[(ri, ci)]
        rec.rmse_values.append(e_rmse)
        rec.mae_values.append(e_mae)
        rec.wall_times.append(wall)
        if err is not None:
            rec.errors.append(f"trial {trial}: {err}")

    grid = np.zeros((len(spec.rank_values), len(spec.rho_values)), dtype=int)
    for (ri, ci), rec in records.items():
        mean_rmse = float(np.mean(rec.rmse_values)) if rec.rmse_values else float("inf")
        rec.success = bool(np.isfinite(mean_rmse) and mean_rmse < spec.success_rmse)
        grid[ri, ci] = int(rec.success)
    ordered = [records[(ri, ci)]
               for ri in range(len(spec.rank_values))
               for ci in range(len(spec.rho_values))]
    return grid, ordered


def run_scaling_bench(sizes, reps: int = 3, iters: int = 20, seed: int = 0):
    """Per-iteration wall time of the solver on a x a x a tensors with k = a.

    Returns a list of (a, seconds_per_iteration) rows, one per size, using
    the median over reps. Sizes must be ascending.
    """
    sizes = [int(a) for a in sizes]
    if sizes != sorted(sizes):
        raise ValueError("sizes must be sorted ascending")
    # untimed warmup so first-call library setup does not pollute the smallest size
    with threadpool_limits(limits=1):
        warm = np.random.default_rng(seed).standard_normal((6, 6, 6))
        admm_solve(warm, np.ones_like(warm),
                   SolverConfig(k=6, mu0=1.0, max_iters=3, tol=0.0, track_objective=False))
    rows = []
    for a in sizes:
        per_iter = []
        for rep in range(reps):
            rng = np.random.default_rng([seed, a, rep])
            truth = rng.standard_normal((a, a, a))
            mask = gen_bernoulli((a, a, a), 0.5, seed=int(rng.integers(2 ** 31)))
            # mu0 = 1 puts every timed iteration in the thresholding-active
            # regime the complexity claim describes
            cfg = SolverConfig(k=a, lam=1e10, mu0=1.0, max_iters=iters, tol=0.0,
                               track_objective=False)
            with threadpool_limits(limits=1):  # stable single-thread timings
                _, report = admm_solve(truth * mask.mask, mask, cfg)
            per_iter.append(report.wall_time / report.iterations)
        rows.append((a, float(np.median(per_iter))))
    return rows
