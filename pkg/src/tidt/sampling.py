"""Observation masks for non-random missingness and recovery diagnostics.

Pattern 1 drops one contiguous time window across every spatial fiber,
pattern 2 drops a per-fiber contiguous window at a random offset, pattern 3
drops a random subset of spatial fibers per time slice. Bernoulli and
prediction (last-h-slices) masks cover the randomized and forecasting
corollaries. The diagnostics compute the minimum temporal sampling rate, the
embedded-tensor incoherence and the resulting sampling-rate bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hankel import HankelConfig, cyclic_embed, hankel_forward, symmetric_pad
from .t_algebra import (
    TransformSpec,
    multi_rank_sum,
    t_product,
    t_transpose,
    t_svd,
    tsvd_rank,
)

__all__ = [
    "SamplingMask",
    "TheoryDiagnostics",
    "as_mask_array",
    "apply_mask",
    "hankel_mask",
    "min_temporal_sampling_rate",
    "gen_pattern",
    "gen_bernoulli",
    "gen_prediction",
    "incoherence_mu",
    "theory_bound",
]

PATTERN_KINDS = ("pattern1", "pattern2", "pattern3", "bernoulli", "prediction", "custom")


@dataclass
class SamplingMask:
    """Binary observation tensor plus provenance of how it was generated."""

    mask: np.ndarray
    pattern_kind: str = "custom"
    rate: float | None = None
    theta: float | None = None
    horizon: int | None = None
    seed: int | None = None

    def __post_init__(self):
        self.mask = np.asarray(self.mask, dtype=float)
        if not np.all((self.mask == 0.0) | (self.mask == 1.0)):
            raise ValueError("mask entries must be exactly 0 or 1")
        if self.pattern_kind not in PATTERN_KINDS:
            raise ValueError(f"unknown pattern kind {self.pattern_kind!r}")


def as_mask_array(mask) -> np.ndarray:
    """Accept a SamplingMask or a raw 0/1 array."""
    if isinstance(mask, SamplingMask):
        return mask.mask
    arr = np.asarray(mask, dtype=float)
    if not np.all((arr == 0.0) | (arr == 1.0)):
        raise ValueError("mask entries must be exactly 0 or 1")
    return arr


def apply_mask(x: np.ndarray, mask) -> np.ndarray:
    m = as_mask_array(mask)
    x = np.asarray(x, dtype=float)
    if x.shape != m.shape:
        raise ValueError(f"shape mismatch: data {x.shape} vs mask {m.shape}")
    return x * m


def hankel_mask(mask, cfg: HankelConfig) -> SamplingMask:
    """Embedded observation mask: the unscaled Hankelization of the mask,
    so entries stay exactly 0/1. Commutes with masking the data."""
    m = as_mask_array(mask)
    if cfg.padding == "symmetric":
        m = symmetric_pad(m)
    return SamplingMask(cyclic_embed(m, cfg.k), "custom")


def min_temporal_sampling_rate(mask) -> float:
    """Smallest per-fiber fraction of observed time points."""
    m = as_mask_array(mask)
    t = m.shape[0]
    return float(m.reshape(t, -1).mean(axis=0).min())


def _ceil_count(x: float) -> int:
    # guard against float noise pushing an exact integer over the next ceil
    return int(math.ceil(x - 1e-9))


def gen_pattern(kind: int, shape, rate: float, seed: int = 0) -> SamplingMask:
    """Structured non-random mask of the given pattern kind (1, 2 or 3)."""
    if kind not in (1, 2, 3):
        raise ValueError(f"pattern kind must be 1, 2 or 3, got {kind}")
    if not 0.0 < rate <= 1.0:
        raise ValueError(f"rate must be in (0, 1], got {rate}")
    shape = tuple(int(s) for s in shape)
    t = shape[0]
    n = int(np.prod(shape[1:])) if len(shape) > 1 else 1
    rng = np.random.default_rng(seed)
    mask = np.ones((t, n))
    if kind in (1, 2):
        block = _ceil_count((1.0 - rate) * t)
        if kind == 1 and block >= t:
            raise ValueError(
                f"pattern 1 with rate {rate} would drop the whole temporal extent")
        if block > 0:
            if kind == 1:
                start = int(rng.integers(0, t - block + 1))
                mask[start:start + block, :] = 0.0
            else:
                starts = rng.integers(0, max(t - block, 0) + 1, size=n)
                rows = np.arange(t)[:, None]
                mask[(rows >= starts) & (rows < starts + block)] = 0.0
    else:
        drop = _ceil_count((1.0 - rate) * n)
        if drop > 0:
            order = rng.random((t, n)).argsort(axis=1)[:, :drop]
            mask[np.arange(t)[:, None], order] = 0.0
    return SamplingMask(mask.reshape(shape), f"pattern{kind}", rate=rate, seed=seed)


def gen_bernoulli(shape, theta: float, seed: int = 0) -> SamplingMask:
    """Entries observed independently with probability theta."""
    if not 0.0 < theta <= 1.0:
        raise ValueError(f"theta must be in (0, 1], got {theta}")
    shape = tuple(int(s) for s in shape)
    rng = np.random.default_rng(seed)
    mask = (rng.random(shape) < theta).astype(float)
    return SamplingMask(mask, "bernoulli", theta=theta, seed=seed)


def gen_prediction(shape, h: int) -> SamplingMask:
    """Forecasting mask: the last h time slices are unobserved."""
    shape = tuple(int(s) for s in shape)
    t = shape[0]
    if not 0 <= h < t:
        raise ValueError(f"horizon must be in [0, {t - 1}], got {h}")
    mask = np.ones(shape)
    if h > 0:
        mask[t - h:] = 0.0
    return SamplingMask(mask, "prediction", horizon=h)


def incoherence_mu(m: np.ndarray, cfg: HankelConfig,
                   spec: TransformSpec = TransformSpec()) -> float:
    """Smallest mu satisfying both embedded-tensor incoherence conditions.

    Uses the skinny factorization of the embedded tensor (tubes below the
    rank tolerance excluded) and probes it with the temporal basis tensors:
    mu = max over the row/column sides of (extent * n / r) * max basis energy.
    """
    h = hankel_forward(np.asarray(m, dtype=float), cfg)
    t, k = h.shape[0], h.shape[1]
    spatial = h.shape[2:]
    n = int(np.prod(spatial)) if spatial else 1
    r = tsvd_rank(h, spec)
    if r == 0:
        raise ValueError("embedded tensor has rank 0; incoherence is undefined")
    f = t_svd(h, spec).truncate(r)

    def side_mu(factor: np.ndarray, extent: int) -> float:
        # one t-product against the stacked basis tensors: lateral slice i of
        # the result is factor^T * e_i (unit spike at temporal index i,
        # first spatial position)
        basis = np.zeros((extent, extent) + spatial)
        diag = (np.arange(extent), np.arange(extent)) + (0,) * len(spatial)
        basis[diag] = 1.0
        proj = t_product(t_transpose(factor, spec), basis, spec)
        energies = (proj ** 2).reshape(r, extent, -1).sum(axis=(0, 2))
        return float(extent * n / r * energies.max())

    return max(side_mu(f.u, t), side_mu(f.v, k))


@dataclass
class TheoryDiagnostics:
    """Sampling-rate bound of the exact-recovery condition, with inputs."""

    rho: float
    mu: float
    r: int
    r_s: int
    rho_bound: float
    alpha: float
    satisfied: bool
    h_max: float

    def as_dict(self) -> dict:
        return {
            "rho": self.rho,
            "mu": self.mu,
            "r": self.r,
            "r_s": self.r_s,
            "rho_bound": self.rho_bound,
            "h_max": self.h_max,
            "alpha": self.alpha,
            "satisfied": self.satisfied,
        }


def theory_bound(m: np.ndarray, mask, cfg: HankelConfig,
                 spec: TransformSpec = TransformSpec(), alpha: float = 0.99) -> TheoryDiagnostics:
    """Assemble rho, mu, r, r_s and the recovery bound for a ground-truth
    tensor and a mask. alpha=1 gives the noiseless bound exactly."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    h = hankel_forward(np.asarray(m, dtype=float), cfg)
    t_eff = h.shape[0]
    r = tsvd_rank(h, spec)
    r_s = multi_rank_sum(h, spec)
    mu = incoherence_mu(m, cfg, spec)
    rho = min_temporal_sampling_rate(mask)
    raw = 1.0 - alpha * cfg.k / (2.0 * mu * r * (r_s + 1) * t_eff)
    rho_bound = float(np.clip(raw, 0.0, 1.0))
    h_max = cfg.k / (2.0 * mu * r * (r_s + 1))
    return TheoryDiagnostics(rho=rho, mu=mu, r=r, r_s=r_s, rho_bound=rho_bound,
                             alpha=alpha, satisfied=bool(rho > rho_bound), h_max=h_max)
