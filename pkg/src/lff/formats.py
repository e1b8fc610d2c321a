"""On-disk layouts shared by spectra, features and CLI outputs.

Matrix files are little-endian::

    offset  type      field
    0       4 bytes   magic b"LFFM"
    4       uint32    n_rows (T, frames)
    8       uint32    n_cols (N bins or M filters)
    12      uint32    kind (0 magnitude, 1 power, 2 dB features)
    16      uint32    window_len
    20      uint32    hop
    24      uint32    n_fft (0 when not STFT based)
    28      float32   n_rows * n_cols values, row-major (time-major)
"""

from __future__ import annotations

import csv
import hashlib
import json
import struct
from dataclasses import dataclass

import numpy as np

from .errors import FormatError

MATRIX_MAGIC = b"LFFM"
_HEADER = struct.Struct("<4s6I")

KIND_MAGNITUDE = 0
KIND_POWER = 1
KIND_DB_FEATURES = 2
KIND_NAMES = {KIND_MAGNITUDE: "magnitude", KIND_POWER: "power", KIND_DB_FEATURES: "db"}


@dataclass(frozen=True)
class MatrixHeader:
    n_rows: int
    n_cols: int
    kind: int
    window_len: int
    hop: int
    n_fft: int


def matrix_to_bytes(values: np.ndarray, kind: int, window_len: int, hop: int, n_fft: int) -> bytes:
    values = np.asarray(values)
    if values.ndim != 2:
        raise FormatError("matrix must be 2-D")
    t, n = values.shape
    head = _HEADER.pack(MATRIX_MAGIC, t, n, kind, window_len, hop, n_fft)
    return head + np.ascontiguousarray(values, dtype="<f4").tobytes()


def matrix_from_bytes(blob: bytes) -> tuple:
    if len(blob) < _HEADER.size:
        raise FormatError("matrix file shorter than its header")
    magic, t, n, kind, w, hop, n_fft = _HEADER.unpack_from(blob, 0)
    if magic != MATRIX_MAGIC:
        raise FormatError(f"bad magic {magic!r}")
    if kind not in KIND_NAMES:
        raise FormatError(f"unknown matrix kind {kind}")
    payload = blob[_HEADER.size :]
    if len(payload) != 4 * t * n:
        raise FormatError(f"payload has {len(payload)} bytes, header implies {4 * t * n}")
    values = np.frombuffer(payload, dtype="<f4").reshape(t, n).astype(np.float64)
    return values, MatrixHeader(t, n, kind, w, hop, n_fft)


def write_matrix(path, values, kind, window_len, hop, n_fft) -> None:
    with open(path, "wb") as fh:
        fh.write(matrix_to_bytes(values, kind, window_len, hop, n_fft))


def read_matrix(path) -> tuple:
    with open(path, "rb") as fh:
        return matrix_from_bytes(fh.read())


def write_matrix_csv(path, values: np.ndarray) -> None:
    values = np.asarray(values)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["frame"] + [f"c{j}" for j in range(values.shape[1])])
        for i, row in enumerate(values):
            w.writerow([i] + [repr(float(v)) for v in row])


def config_hash(config) -> str:
    """Short stable digest of a JSON-serializable config."""
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


def bytes_hash(blob: bytes) -> str:
    return hashlib.sha256(blob).hexdigest()[:16]
