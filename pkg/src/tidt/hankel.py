"""Temporal isometric delay-embedding: cyclic Hankelization along mode 1.

A length-t temporal signal maps to the first k columns of its anti-circulant
Hankel matrix, scaled by 1/sqrt(k); applied fiber-wise this raises the tensor
order by exactly one. The map is an isometry, and its adjoint is its inverse.
Also provided: the smoothness/periodicity statistics whose size controls the
rank of the embedded tensor, and the corresponding computable bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .t_algebra import TransformSpec, face_singular_values

__all__ = [
    "HankelConfig",
    "BoundCheck",
    "symmetric_pad",
    "symmetric_unpad",
    "cyclic_embed",
    "hankel_forward",
    "hankel_inverse",
    "smoothness",
    "periodicity",
    "rank_error",
    "check_smoothness_bound",
    "check_periodicity_bound",
]

_PADDINGS = ("none", "symmetric")


@dataclass(frozen=True)
class HankelConfig:
    """Column count k (scale coefficient) and temporal padding mode."""

    k: int
    padding: str = "none"

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.padding not in _PADDINGS:
            raise ValueError(f"padding must be one of {_PADDINGS}, got {self.padding!r}")


def symmetric_pad(x: np.ndarray) -> np.ndarray:
    """[x_1..x_t] -> [x_1..x_t, x_t..x_1] along mode 1."""
    x = np.asarray(x)
    return np.concatenate([x, x[::-1]], axis=0)


def symmetric_unpad(z: np.ndarray) -> np.ndarray:
    """Average the two mirrored halves back to length t."""
    z = np.asarray(z)
    if z.shape[0] % 2:
        raise ValueError(f"padded temporal extent must be even, got {z.shape[0]}")
    t = z.shape[0] // 2
    return 0.5 * (z[:t] + z[t:][::-1])


def cyclic_embed(x: np.ndarray, k: int) -> np.ndarray:
    """Unscaled embedding: out[i, j, ...] = x[(i + j) mod t, ...]."""
    x = np.asarray(x)
    t = x.shape[0]
    if not 1 <= k <= t:
        raise ValueError(f"k must be in [1, {t}], got {k}")
    idx = (np.arange(t)[:, None] + np.arange(k)[None, :]) % t
    return x[idx]


def hankel_forward(m: np.ndarray, cfg: HankelConfig) -> np.ndarray:
    """Temporal Hankel tensor of m: order p+1 in, order p+2 out.

    Column j (0-based) of the new mode 2 is the j-step cyclic temporal shift
    of m, scaled by 1/sqrt(k). With symmetric padding, m is first mirrored to
    length 2t.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim < 1 or m.shape[0] < 1:
        raise ValueError("input must have a temporal mode of extent >= 1")
    if cfg.padding == "symmetric":
        m = symmetric_pad(m)
    return cyclic_embed(m, cfg.k) / math.sqrt(cfg.k)


def hankel_inverse(z: np.ndarray, cfg: HankelConfig) -> np.ndarray:
    """Adjoint (= inverse) of hankel_forward.

    Entry s of the output accumulates the k embedded copies that entry s
    feeds, scaled 1/sqrt(k). With symmetric padding the mirrored halves of
    the length-2t intermediate are averaged down to length t.
    """
    z = np.asarray(z, dtype=float)
    if z.ndim < 2:
        raise ValueError("Hankel tensor must have order >= 2")
    t, k = z.shape[0], z.shape[1]
    if k != cfg.k:
        raise ValueError(f"mode-2 extent {k} does not match cfg.k={cfg.k}")
    if not 1 <= k <= t:
        raise ValueError(f"k must be in [1, {t}], got {k}")
    src = (np.arange(t)[:, None] - np.arange(k)[None, :]) % t
    cols = np.broadcast_to(np.arange(k)[None, :], (t, k))
    out = z[src, cols].sum(axis=1) / math.sqrt(k)
    if cfg.padding == "symmetric":
        out = symmetric_unpad(out)
    return out


def smoothness(m: np.ndarray) -> float:
    """Frobenius distance between m and its one-step cyclic temporal shift."""
    m = np.asarray(m, dtype=float)
    return float(np.linalg.norm((m - np.roll(m, -1, axis=0)).ravel()))


def periodicity(m: np.ndarray, tau: int) -> float:
    """Frobenius distance between m and its tau-step cyclic temporal shift."""
    m = np.asarray(m, dtype=float)
    if not 1 <= tau <= m.shape[0]:
        raise ValueError(f"tau must be in [1, {m.shape[0]}], got {tau}")
    return float(np.linalg.norm((m - np.roll(m, -tau, axis=0)).ravel()))


def rank_error(z: np.ndarray, r: int, spec: TransformSpec = TransformSpec()) -> float:
    """Exact best approximation error under a t-SVD rank-r constraint.

    Eckart-Young per transform-domain face: drop all singular values past the
    leading r and measure the Frobenius residual (mapped back through the
    Parseval factor ell). For an order-2 input this is the classical matrix
    truncation error.
    """
    z = np.asarray(z, dtype=float)
    t, k = z.shape[0], z.shape[1]
    if not 0 <= r <= min(t, k):
        raise ValueError(f"r must be in [0, {min(t, k)}], got {r}")
    s = face_singular_values(z, spec)
    resid = float((s[:, r:] ** 2).sum())
    return math.sqrt(max(resid, 0.0) / spec.ell(z.shape[2:]))


@dataclass(frozen=True)
class BoundCheck:
    lhs: float
    rhs: float
    holds: bool


def check_smoothness_bound(m: np.ndarray, k: int, r: int,
                           spec: TransformSpec = TransformSpec()) -> BoundCheck:
    """Rank-r truncation error vs the smoothness bound
    sqrt((k-r)/3k) * ceil(k/r) * eta."""
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    h = hankel_forward(m, HankelConfig(k))
    lhs = rank_error(h, r, spec)
    rhs = math.sqrt(max(k - r, 0) / (3.0 * k)) * math.ceil(k / r) * smoothness(m)
    return BoundCheck(lhs, rhs, lhs <= rhs + 1e-10)


def check_periodicity_bound(m: np.ndarray, k: int, tau: int,
                            spec: TransformSpec = TransformSpec()) -> BoundCheck:
    """Rank-tau truncation error vs the periodicity bound
    (tau/sqrt(k)) * (ceil(k/tau)-1) * beta_tau. The rank is fixed at tau."""
    h = hankel_forward(m, HankelConfig(k))
    lhs = rank_error(h, tau, spec)
    rhs = (tau / math.sqrt(k)) * (math.ceil(k / tau) - 1) * periodicity(m, tau)
    return BoundCheck(lhs, rhs, lhs <= rhs + 1e-10)
