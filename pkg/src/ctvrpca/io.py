"""Binary tensor files and CSV/JSON writers.

Tensor file layout (all little-endian)::

    bytes 0..3    magic b"CTV1"
    bytes 4..15   uint32 h, w, s
    bytes 16..    h*w*s float64 values, element (i, j, k) at index (k*w + j)*h + i
"""

import csv
import json
import math
import struct

import numpy as np

from .errors import FormatError
from .tensor import UnfoldedMatrix, unfold

MAGIC = b"CTV1"
HEADER = struct.Struct("<4sIII")

DIAGNOSTICS_SCHEMA_VERSION = 1
DIAGNOSTICS_COLUMNS = (
    "iter", "chg_m", "chg_x", "chg_s", "chg",
    "rel_err_m", "rel_err_x", "rel_err_s", "objective",
    "feas_g1", "feas_g2", "feas_g3", "mu",
)
GRID_SCHEMA_VERSION = 1
GRID_COLUMNS = (
    "cell_i", "cell_j", "rho_s", "rank_ratio", "rank", "solver",
    "trial", "seed", "success", "rel_err", "iters", "converged",
)


def encode_tensor(t):
    if isinstance(t, UnfoldedMatrix):
        dims, data = t.dims, t.data
    else:
        t = np.asarray(t, dtype=np.float64)
        if t.ndim != 3:
            raise FormatError("tensor files hold 3-way arrays")
        dims, data = t.shape, t
    h, w, s = dims
    payload = np.ravel(data, order="F").astype("<f8", copy=False).tobytes()
    return HEADER.pack(MAGIC, h, w, s) + payload


def decode_tensor(blob):
    if len(blob) < HEADER.size:
        raise FormatError(f"tensor file truncated: {len(blob)} bytes")
    magic, h, w, s = HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if min(h, w, s) < 1:
        raise FormatError(f"invalid extents {(h, w, s)}")
    expected = HEADER.size + 8 * h * w * s
    if len(blob) != expected:
        raise FormatError(f"tensor file has {len(blob)} bytes, expected {expected}")
    data = np.frombuffer(blob, dtype="<f8", offset=HEADER.size).astype(np.float64)
    return data.reshape((h, w, s), order="F")


def write_tensor(path, t):
    with open(path, "wb") as fh:
        fh.write(encode_tensor(t))


def read_tensor(path):
    with open(path, "rb") as fh:
        return decode_tensor(fh.read())


def read_unfolded(path):
    return unfold(read_tensor(path))


def fmt_float(x):
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    return obj


def write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")


def write_diagnostics_csv(path, diagnostics):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(DIAGNOSTICS_COLUMNS)
        for d in diagnostics:
            writer.writerow([d.iter] + [fmt_float(getattr(d, c)) for c in DIAGNOSTICS_COLUMNS[1:]])


def write_grid_csv(path, grid):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(GRID_COLUMNS)
        for r in grid.records:
            writer.writerow([
                r.cell_i, r.cell_j, fmt_float(r.rho_s), fmt_float(r.rank_ratio), r.rank,
                r.solver, r.trial, r.seed, int(r.success), fmt_float(r.rel_err),
                r.iters, int(r.converged),
            ])
