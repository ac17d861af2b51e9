"""Order-d t-SVD algebra under invertible trailing-mode transforms.

Tensors are plain float64 numpy arrays. The first two modes play the matrix
roles; the remaining trailing modes index "faces". After an invertible linear
transform along the trailing modes, the t-product and everything built on it
(transpose, SVD, norms, singular value thresholding) reduce to independent
matrix operations on the faces.

Supported transforms: the unnormalized DFT (the classical t-product via
circular convolution), the orthonormal DCT-II, and seeded random orthogonal
matrices. Each per-mode matrix L satisfies L* L = c I; the product of the
per-mode constants is the normalization ``ell`` that enters the tensor
nuclear norm and the Parseval identity ``||X_L||_F^2 = ell * ||X||_F^2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

__all__ = [
    "TransformSpec",
    "TSvdFactors",
    "transform_forward",
    "transform_inverse",
    "t_product",
    "t_transpose",
    "identity_tensor",
    "t_svd",
    "face_singular_values",
    "tsvd_rank",
    "multi_rank",
    "multi_rank_sum",
    "tnn",
    "spectral_norm",
    "t_svt",
]

RANK_TOL = 1e-8  # relative to the largest singular value, for all rank counting

_KINDS = ("dft", "dct", "rot")


@dataclass(frozen=True)
class TransformSpec:
    """Which invertible trailing-mode transform defines the t-algebra.

    ``kind`` is one of ``"dft"``, ``"dct"``, ``"rot"``; ``seed`` is only
    meaningful for the random orthogonal kind, where it makes the per-mode
    matrices reproducible.
    """

    kind: str = "dft"
    seed: int = 0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown transform kind {self.kind!r}, expected one of {_KINDS}")

    def ell(self, trailing_shape) -> float:
        """Normalization constant: prod of per-mode c in L*L = c I."""
        if self.kind == "dft":
            return float(np.prod(trailing_shape)) if len(trailing_shape) else 1.0
        return 1.0

    def matrix(self, n: int, mode: int) -> np.ndarray:
        """Explicit transform matrix for a trailing mode of extent n.

        ``mode`` is the position among the trailing modes (0-based); it only
        matters for the random orthogonal kind, where each mode gets its own
        matrix.
        """
        return _transform_matrix(self.kind, self.seed, n, mode)

    def inverse_matrix(self, n: int, mode: int) -> np.ndarray:
        L = self.matrix(n, mode)
        if self.kind == "dft":
            return L.conj().T / n
        return L.T  # real orthonormal


@lru_cache(maxsize=256)
def _transform_matrix(kind: str, seed: int, n: int, mode: int) -> np.ndarray:
    if kind == "dft":
        j = np.arange(n)
        return np.exp(-2j * np.pi * np.outer(j, j) / n)
    if kind == "dct":
        j, i = np.meshgrid(np.arange(n), np.arange(n))
        C = np.sqrt(2.0 / n) * np.cos(np.pi * (2 * j + 1) * i / (2 * n))
        C[0, :] /= np.sqrt(2.0)
        return C
    rng = np.random.default_rng([seed, mode, n])
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))  # sign-fix for determinism


def _trailing_axes(x: np.ndarray) -> tuple:
    return tuple(range(2, x.ndim))


def transform_forward(x: np.ndarray, spec: TransformSpec) -> np.ndarray:
    """Apply the per-mode transform along the trailing d-2 modes.

    Orders 1 and 2 pass through unchanged. The DFT path uses the FFT, which
    is exactly multiplication by the unnormalized DFT matrix on each mode.
    """
    x = np.asarray(x)
    if x.ndim <= 2:
        return x
    if spec.kind == "dft":
        return np.fft.fftn(x, axes=_trailing_axes(x))
    out = x
    for pos, ax in enumerate(_trailing_axes(x)):
        L = spec.matrix(x.shape[ax], pos)
        out = np.moveaxis(np.tensordot(L, out, axes=(1, ax)), 0, ax)
    return out


def transform_inverse(x: np.ndarray, spec: TransformSpec) -> np.ndarray:
    x = np.asarray(x)
    if x.ndim <= 2:
        return x
    if spec.kind == "dft":
        return np.fft.ifftn(x, axes=_trailing_axes(x))
    out = x
    for pos, ax in enumerate(_trailing_axes(x)):
        L = spec.inverse_matrix(x.shape[ax], pos)
        out = np.moveaxis(np.tensordot(L, out, axes=(1, ax)), 0, ax)
    return out


def _realify(x: np.ndarray, context: str) -> np.ndarray:
    """Drop a small imaginary residue after an inverse DFT.

    The tolerance is 1e-9 for order-one data and scales with the magnitude of
    the real part; a residue above it signals an internal inconsistency.
    """
    if not np.iscomplexobj(x):
        return x
    re = x.real
    scale = float(np.max(np.abs(re))) if re.size else 0.0
    tol = 1e-9 * max(1.0, scale)
    imax = float(np.max(np.abs(x.imag))) if x.size else 0.0
    if imax > tol:
        raise RuntimeError(
            f"{context}: imaginary residue {imax:.3e} exceeds tolerance {tol:.3e}"
        )
    return np.ascontiguousarray(re)


def _to_faces(xl: np.ndarray) -> np.ndarray:
    """(n1, n2, *trailing) -> (faces, n1, n2), faces in lexicographic order."""
    n1, n2 = xl.shape[:2]
    return np.moveaxis(xl, (0, 1), (-2, -1)).reshape(-1, n1, n2)


def _from_faces(faces: np.ndarray, shape: tuple) -> np.ndarray:
    n1, n2 = shape[:2]
    return np.moveaxis(faces.reshape(shape[2:] + (n1, n2)), (-2, -1), (0, 1))


@lru_cache(maxsize=256)
def _mirror_permutation(trailing: tuple) -> np.ndarray:
    """Flat face index of the frequency-negated multi-index, per mode."""
    grids = np.meshgrid(*[np.arange(n) for n in trailing], indexing="ij")
    neg = [(-g) % n for g, n in zip(grids, trailing)]
    return np.ravel_multi_index(neg, trailing).ravel()


def _batched_svd(faces: np.ndarray, compute_uv: bool = True):
    """np.linalg.svd over stacked faces, reporting the offending face index
    when LAPACK fails to converge."""
    try:
        return np.linalg.svd(faces, full_matrices=False, compute_uv=compute_uv)
    except np.linalg.LinAlgError:
        for i in range(faces.shape[0]):
            try:
                np.linalg.svd(faces[i], full_matrices=False, compute_uv=compute_uv)
            except np.linalg.LinAlgError:
                raise np.linalg.LinAlgError(f"SVD did not converge on face slice {i}")
        raise


def _check_t_shapes(a: np.ndarray, b: np.ndarray):
    if a.ndim != b.ndim:
        raise ValueError(f"order mismatch: {a.ndim} vs {b.ndim}")
    if a.ndim < 2:
        raise ValueError("t-product operands must have order >= 2")
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"inner dimension mismatch: {a.shape} * {b.shape}")
    if a.shape[2:] != b.shape[2:]:
        raise ValueError(f"trailing mode mismatch: {a.shape[2:]} vs {b.shape[2:]}")


def t_product(a: np.ndarray, b: np.ndarray, spec: TransformSpec = TransformSpec()) -> np.ndarray:
    """Tensor-tensor product: face-wise matrix multiplication in the
    transform domain (circular convolution of tubes for the DFT)."""
    a = np.asarray(a, dtype=float) if not np.iscomplexobj(a) else np.asarray(a)
    b = np.asarray(b, dtype=float) if not np.iscomplexobj(b) else np.asarray(b)
    _check_t_shapes(a, b)
    al = transform_forward(a, spec)
    bl = transform_forward(b, spec)
    am = np.moveaxis(al, (0, 1), (-2, -1))
    bm = np.moveaxis(bl, (0, 1), (-2, -1))
    cm = am @ bm
    c = transform_inverse(np.moveaxis(cm, (-2, -1), (0, 1)), spec)
    return _realify(c, "t_product") if spec.kind == "dft" else c


def t_transpose(a: np.ndarray, spec: TransformSpec = TransformSpec()) -> np.ndarray:
    """Conjugate-transpose every face in the transform domain."""
    a = np.asarray(a)
    if a.ndim < 2:
        raise ValueError("t_transpose requires order >= 2")
    if spec.kind != "dft":
        return np.ascontiguousarray(np.swapaxes(a, 0, 1))  # real transforms commute with the swap
    al = transform_forward(a, spec)
    out = transform_inverse(np.conj(np.swapaxes(al, 0, 1)), spec)
    return _realify(out, "t_transpose") if not np.iscomplexobj(a) else out


def identity_tensor(n: int, trailing: tuple = (), spec: TransformSpec = TransformSpec()) -> np.ndarray:
    """Tensor whose every transform-domain face is the n-by-n identity."""
    trailing = tuple(trailing)
    faces = np.broadcast_to(np.eye(n), (int(np.prod(trailing)) if trailing else 1, n, n))
    out = transform_inverse(_from_faces(faces.astype(complex if spec.kind == "dft" else float),
                                        (n, n) + trailing), spec)
    return _realify(out, "identity_tensor") if spec.kind == "dft" else out


def _face_svd_symmetric(faces: np.ndarray, trailing: tuple):
    """Per-face SVD with explicit conjugate pairing for the DFT of real data.

    Only canonical faces (flat index <= mirrored index) are decomposed; the
    mirrored faces get the conjugated factors, which keeps the inverse FFT of
    each factor exactly real.
    """
    mir = _mirror_permutation(trailing)
    idx = np.arange(mir.size)
    canon = idx[idx <= mir]
    rest = idx[idx > mir]
    u_c, s_c, vh_c = _batched_svd(faces[canon])
    m = s_c.shape[-1]
    u = np.empty((faces.shape[0], faces.shape[1], m), dtype=complex)
    s = np.empty((faces.shape[0], m))
    vh = np.empty((faces.shape[0], m, faces.shape[2]), dtype=complex)
    u[canon], s[canon], vh[canon] = u_c, s_c, vh_c
    u[rest] = np.conj(u[mir[rest]])
    s[rest] = s[mir[rest]]
    vh[rest] = np.conj(vh[mir[rest]])
    return u, s, vh


@dataclass
class TSvdFactors:
    """Orthogonal/f-diagonal factor triple with Z = U * S * V^T."""

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray
    spec: TransformSpec = field(default_factory=TransformSpec)

    def compose(self) -> np.ndarray:
        return t_product(t_product(self.u, self.s, self.spec),
                         t_transpose(self.v, self.spec), self.spec)

    def singular_tubes(self) -> np.ndarray:
        """Transform-domain singular values, shape (faces, min(n1, n2))."""
        sl = transform_forward(self.s, self.spec)
        faces = _to_faces(sl)
        m = min(faces.shape[1], faces.shape[2])
        return np.real(faces[:, np.arange(m), np.arange(m)])

    def truncate(self, r: int) -> "TSvdFactors":
        """Skinny factors keeping the leading r tubes."""
        return TSvdFactors(self.u[:, :r], self.s[:r, :r], self.v[:, :r], self.spec)


def t_svd(z: np.ndarray, spec: TransformSpec = TransformSpec()) -> TSvdFactors:
    """Factor z into U * S * V^T via per-face SVDs in the transform domain.

    Returns economy-size factors: U is n1 x m, S is m x m f-diagonal, V is
    n2 x m along the first two modes, with m = min(n1, n2).
    """
    z = np.asarray(z, dtype=float)
    if z.ndim < 2:
        raise ValueError("t_svd requires order >= 2")
    n1, n2 = z.shape[:2]
    trailing = z.shape[2:]
    m = min(n1, n2)
    zl = transform_forward(z, spec)
    faces = _to_faces(zl)
    if spec.kind == "dft" and z.ndim > 2:
        u, s, vh = _face_svd_symmetric(faces, trailing)
    else:
        u, s, vh = _batched_svd(faces)
    v = np.conj(np.swapaxes(vh, -2, -1))
    U = transform_inverse(_from_faces(u, (n1, m) + trailing), spec)
    V = transform_inverse(_from_faces(v, (n2, m) + trailing), spec)
    # inverse-transform the diagonal tubes only, so off-diagonals stay exact zeros
    tubes = transform_inverse(s.T.reshape((m, 1) + trailing), spec)
    if spec.kind == "dft":
        U = _realify(U, "t_svd U")
        V = _realify(V, "t_svd V")
        tubes = _realify(tubes, "t_svd S")
    S = np.zeros((m, m) + trailing)
    S[np.arange(m), np.arange(m)] = tubes[:, 0]
    return TSvdFactors(U, S, V, spec)


def face_singular_values(z: np.ndarray, spec: TransformSpec = TransformSpec()) -> np.ndarray:
    """Singular values of every transform-domain face, shape (faces, m)."""
    z = np.asarray(z)
    if z.ndim < 2:
        raise ValueError("requires order >= 2")
    zl = transform_forward(z, spec)
    faces = _to_faces(zl)
    if spec.kind == "dft" and z.ndim > 2:
        # conjugate faces share singular values; decompose the canonical half
        mir = _mirror_permutation(z.shape[2:])
        idx = np.arange(mir.size)
        canon = idx[idx <= mir]
        s = np.empty((faces.shape[0], min(z.shape[0], z.shape[1])))
        s[canon] = _batched_svd(faces[canon], compute_uv=False)
        rest = idx[idx > mir]
        s[rest] = s[mir[rest]]
        return s
    return _batched_svd(faces, compute_uv=False)


def tsvd_rank(z: np.ndarray, spec: TransformSpec = TransformSpec(), rank_tol: float = RANK_TOL) -> int:
    """Number of singular tubes with Frobenius norm above rank_tol * sigma_max."""
    s = face_singular_values(z, spec)
    smax = float(s.max(initial=0.0))
    if smax == 0.0:
        return 0
    tube_norms = np.sqrt((s ** 2).sum(axis=0))
    return int(np.count_nonzero(tube_norms > rank_tol * smax))


def multi_rank(z: np.ndarray, spec: TransformSpec = TransformSpec(), rank_tol: float = RANK_TOL) -> np.ndarray:
    """Per-face matrix ranks (lexicographic face order), same relative tolerance."""
    s = face_singular_values(z, spec)
    smax = float(s.max(initial=0.0))
    if smax == 0.0:
        return np.zeros(s.shape[0], dtype=int)
    return (s > rank_tol * smax).sum(axis=1).astype(int)


def multi_rank_sum(z: np.ndarray, spec: TransformSpec = TransformSpec(), rank_tol: float = RANK_TOL) -> int:
    return int(multi_rank(z, spec, rank_tol).sum())


def tnn(z: np.ndarray, spec: TransformSpec = TransformSpec()) -> float:
    """Tensor nuclear norm: sum of all transform-domain singular values / ell."""
    z = np.asarray(z)
    s = face_singular_values(z, spec)
    return float(s.sum() / spec.ell(z.shape[2:]))


def spectral_norm(z: np.ndarray, spec: TransformSpec = TransformSpec()) -> float:
    """Largest transform-domain face spectral norm."""
    s = face_singular_values(z, spec)
    return float(s.max(initial=0.0))


def t_svt(z: np.ndarray, tau: float, spec: TransformSpec = TransformSpec()) -> np.ndarray:
    """Singular value thresholding: prox of tau * tnn at z.

    Shrinks every transform-domain singular value by tau (floored at zero)
    and maps back. The unique minimizer of
    ``tau * tnn(X) + 0.5 * ||X - Z||_F^2``.
    """
    if tau < 0:
        raise ValueError(f"tau must be nonnegative, got {tau}")
    z = np.asarray(z, dtype=float)
    if z.ndim < 2:
        raise ValueError("t_svt requires order >= 2")
    zl = transform_forward(z, spec)
    faces = _to_faces(zl)
    if spec.kind == "dft" and z.ndim > 2:
        # shrinkage output is unique per face, so conjugate faces can be filled
        # by conjugation; decompose only the canonical half
        mir = _mirror_permutation(z.shape[2:])
        idx = np.arange(mir.size)
        canon = idx[idx <= mir]
        rest = idx[idx > mir]
        u, s, vh = _batched_svd(faces[canon])
        s = np.maximum(s - tau, 0.0)
        rec = np.empty_like(faces)
        rec[canon] = (u * s[..., None, :]) @ vh
        rec[rest] = np.conj(rec[mir[rest]])
    else:
        u, s, vh = _batched_svd(faces)
        s = np.maximum(s - tau, 0.0)
        rec = (u * s[..., None, :]) @ vh
    out = transform_inverse(_from_faces(rec, z.shape), spec)
    return _realify(out, "t_svt") if spec.kind == "dft" else out


def frobenius(x: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(x).ravel()))
