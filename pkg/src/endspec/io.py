"""Binary matrix export and provenance-stamped CSV writing.

Matrix file layout (little-endian):
    magic   4 bytes  b"ESPM"
    version u32      1
    dtype   u32      0 = float64, 1 = complex128
    rows    u64
    cols    u64
    payload row-major values

CSV files start with a provenance comment block ("# key: value" lines:
tool version, config hash, command, grid and tolerance settings), then the
column-name row, then data rows.  Float formatting is fixed (repr-exact
%.17g) so identical configurations produce byte-identical tables.
"""

from __future__ import annotations

import hashlib
import struct
from pathlib import Path

import numpy as np

from .errors import EndspecError

__all__ = ["write_matrix", "read_matrix", "write_csv", "config_hash", "fmt"]

_MAGIC = b"ESPM"
_DTYPES = {0: np.float64, 1: np.complex128}
_TAGS = {np.dtype(np.float64): 0, np.dtype(np.complex128): 1}


def write_matrix(path, M: np.ndarray) -> None:
    M = np.ascontiguousarray(M)
    if M.ndim != 2:
        raise EndspecError("only 2D matrices are exportable")
    if M.dtype not in _TAGS:
        M = M.astype(np.complex128 if np.iscomplexobj(M) else np.float64)
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<IIQQ", 1, _TAGS[M.dtype], M.shape[0], M.shape[1]))
        fh.write(M.tobytes(order="C"))


def read_matrix(path) -> np.ndarray:
    with open(path, "rb") as fh:
        if fh.read(4) != _MAGIC:
            raise EndspecError(f"{path}: not a matrix file")
        version, tag, rows, cols = struct.unpack("<IIQQ", fh.read(24))
        if version != 1:
            raise EndspecError(f"{path}: unsupported version {version}")
        if tag not in _DTYPES:
            raise EndspecError(f"{path}: unknown dtype tag {tag}")
        dt = np.dtype(_DTYPES[tag])
        data = np.frombuffer(fh.read(rows * cols * dt.itemsize), dtype=dt)
    return data.reshape(rows, cols).copy()


def fmt(x) -> str:
    """Deterministic scalar formatting for CSV cells."""
    if isinstance(x, complex):
        return f"{x.real:.17g}{x.imag:+.17g}j"
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def config_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def write_csv(path, columns: list[str], rows, provenance: dict) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"# {k}: {v}" for k, v in provenance.items()]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
