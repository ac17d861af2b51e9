"""Binary tensor container and CSV ingestion.

Layout: magic ``TIDT``, format version (u16 LE), order (u16 LE), one u64 LE
extent per mode, then the payload as little-endian float64 in row-major
order. Writes are atomic (temp file in the same directory, then rename).
"""

from __future__ import annotations

import math
import os
import struct
import tempfile

import numpy as np

__all__ = ["MAGIC", "VERSION", "write_tensor", "read_tensor",
           "ingest_csv", "export_csv", "TensorFileError"]

MAGIC = b"TIDT"
VERSION = 1


class TensorFileError(ValueError):
    """Malformed or unsupported tensor file."""


def write_tensor(path, arr: np.ndarray) -> None:
    arr = np.ascontiguousarray(np.asarray(arr, dtype="<f8"))
    header = MAGIC + struct.pack("<HH", VERSION, arr.ndim)
    header += struct.pack(f"<{arr.ndim}Q", *arr.shape)
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(header)
            fh.write(arr.tobytes(order="C"))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_tensor(path) -> np.ndarray:
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 8 or blob[:4] != MAGIC:
        raise TensorFileError(f"{path}: not a TIDT tensor file")
    version, order = struct.unpack("<HH", blob[4:8])
    if version != VERSION:
        raise TensorFileError(f"{path}: unsupported format version {version}")
    head = 8 + 8 * order
    if len(blob) < head:
        raise TensorFileError(f"{path}: truncated header")
    shape = struct.unpack(f"<{order}Q", blob[8:head])
    count = math.prod(shape) if shape else 1
    expected = head + 8 * count
    if len(blob) != expected:
        raise TensorFileError(
            f"{path}: payload length {len(blob) - head} does not match "
            f"extents {shape} (expected {8 * count} bytes)")
    data = np.frombuffer(blob, dtype="<f8", offset=head, count=count)
    return data.reshape(shape).copy()


def ingest_csv(path, shape=None, time_major: bool = True):
    """Parse a rectangular numeric CSV into (tensor, mask-or-None).

    NaN cells become 0 and are marked unobserved in the companion mask; the
    mask is None when every cell is finite. Without ``--shape`` the result is
    order-2 (rows x columns), transposed when the rows are not the time axis.
    With ``shape`` the values are reshaped in row-major order.
    """
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for ln, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            cells = []
            for tok in line.split(","):
                tok = tok.strip()
                try:
                    cells.append(float(tok) if tok else float("nan"))
                except ValueError:
                    raise TensorFileError(f"{path}:{ln}: non-numeric cell {tok!r}")
            rows.append(cells)
    if not rows:
        raise TensorFileError(f"{path}: empty CSV")
    width = len(rows[0])
    for ln, cells in enumerate(rows, 1):
        if len(cells) != width:
            raise TensorFileError(
                f"{path}: ragged row {ln} ({len(cells)} cells, expected {width})")
    arr = np.asarray(rows, dtype=float)
    if shape is not None:
        shape = tuple(int(s) for s in shape)
        if math.prod(shape) != arr.size:
            raise TensorFileError(
                f"{path}: {arr.size} values cannot reshape to {shape}")
        arr = arr.reshape(shape)
    elif not time_major:
        arr = arr.T
    nan = np.isnan(arr)
    mask = None
    if nan.any():
        mask = (~nan).astype(float)
        arr = np.where(nan, 0.0, arr)
    return np.ascontiguousarray(arr), mask


def export_csv(path, arr: np.ndarray) -> None:
    """Write an order-1 or order-2 tensor as CSV with 17 significant digits,
    which round-trips float64 exactly."""
    arr = np.asarray(arr, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise TensorFileError(
            f"CSV export supports order <= 2 tensors, got order {arr.ndim}")
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            for row in arr:
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
