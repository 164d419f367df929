"""Hot inner loops, compiled with numba when available.

Every kernel exists twice: a ``*_numba`` version decorated with ``@njit`` and a
``*_numpy`` version written with plain numpy / Python.  The public names at the
bottom of the module are bound to one or the other at import time.  Setting the
environment variable ``CTVRPCA_DISABLE_NUMBA=1`` forces the fallback path.

Both paths perform the same floating-point operations in the same order, so
their outputs are bitwise identical (the test-suite checks this).

Tensors are handled as flat float64 buffers in column-major order: element
``(i, j, k)`` of an ``h x w x s`` cube lives at ``(k * w + j) * h + i``.
"""

import math
import os

import numpy as np

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def decorator(func):
            return func

        return decorator


_flag = os.environ.get("CTVRPCA_DISABLE_NUMBA", "").strip().lower()
USE_NUMBA = NUMBA_AVAILABLE and _flag in ("", "0", "false", "no")

_MASK64 = 0xFFFFFFFFFFFFFFFF
_TWO_PI = 2.0 * math.pi
_INV_2_53 = 1.0 / 9007199254740992.0


# ----------------------------------------------------------------------------
# circular first differences
# ----------------------------------------------------------------------------


@njit(cache=True)
def circ_diff_numba(buf, h, w, s, axis, adjoint):
    out = np.empty(h * w * s)
    for k in range(s):
        for j in range(w):
            base = (k * w + j) * h
            for i in range(h):
                if axis == 0:
                    if adjoint:
                        q = base + (i - 1 if i > 0 else h - 1)
                    else:
                        q = base + (i + 1 if i < h - 1 else 0)
                elif axis == 1:
                    if adjoint:
                        jj = j - 1 if j > 0 else w - 1
                    else:
                        jj = j + 1 if j < w - 1 else 0
                    q = (k * w + jj) * h + i
                else:
                    if adjoint:
                        kk = k - 1 if k > 0 else s - 1
                    else:
                        kk = k + 1 if k < s - 1 else 0
                    q = (kk * w + j) * h + i
                out[base + i] = buf[q] - buf[base + i]
    return out


def circ_diff_numpy(buf, h, w, s, axis, adjoint):
    t = buf.reshape((h, w, s), order="F")
    shifted = np.roll(t, 1 if adjoint else -1, axis=axis)
    return (shifted - t).ravel(order="F")


# ----------------------------------------------------------------------------
# elementwise soft-thresholding
# ----------------------------------------------------------------------------


@njit(cache=True)
def soft_threshold_numba(buf, tau):
    out = np.empty_like(buf)
    for p in range(buf.size):
        v = buf[p]
        mag = abs(v) - tau
        if mag < 0.0:
            mag = 0.0
        if v > 0.0:
            out[p] = mag
        elif v < 0.0:
            out[p] = -mag
        else:
            out[p] = 0.0
    return out


def soft_threshold_numpy(buf, tau):
    return np.sign(buf) * np.maximum(np.abs(buf) - tau, 0.0)


# ----------------------------------------------------------------------------
# xoshiro256** generator, seeded through splitmix64
# ----------------------------------------------------------------------------
# state: uint64 array of length 4, advanced in place.


@njit(cache=True)
def _rotl(x, k):
    return (x << np.uint64(k)) | (x >> np.uint64(64 - k))


@njit(cache=True)
def _next_u64(state):
    s0 = state[0]
    s1 = state[1]
    s2 = state[2]
    s3 = state[3]
    result = _rotl(s1 * np.uint64(5), 7) * np.uint64(9)
    t = s1 << np.uint64(17)
    s2 ^= s0
    s3 ^= s1
    s1 ^= s2
    s0 ^= s3
    s2 ^= t
    s3 = _rotl(s3, 45)
    state[0] = s0
    state[1] = s1
    state[2] = s2
    state[3] = s3
    return result


@njit(cache=True)
def _next_uniform(state):
    return np.float64(_next_u64(state) >> np.uint64(11)) * (1.0 / 9007199254740992.0)


@njit(cache=True)
def fill_uniform_numba(state, n):
    out = np.empty(n)
    for p in range(n):
        out[p] = _next_uniform(state)
    return out


@njit(cache=True)
def fill_normal_numba(state, n):
    out = np.empty(n)
    p = 0
    while p < n:
        u1 = _next_uniform(state)
        u2 = _next_uniform(state)
        r = math.sqrt(-2.0 * math.log(1.0 - u1))
        theta = 2.0 * math.pi * u2
        out[p] = r * math.cos(theta)
        if p + 1 < n:
            out[p + 1] = r * math.sin(theta)
        p += 2
    return out


@njit(cache=True)
def partial_shuffle_numba(state, n, m):
    perm = np.arange(n)
    for p in range(m):
        q = p + np.int64(_next_uniform(state) * (n - p))
        tmp = perm[p]
        perm[p] = perm[q]
        perm[q] = tmp
    return perm[:m].copy()


def _rotl_py(x, k):
    return ((x << k) | (x >> (64 - k))) & _MASK64


def _next_u64_py(st):
    s0, s1, s2, s3 = st
    result = (_rotl_py((s1 * 5) & _MASK64, 7) * 9) & _MASK64
    t = (s1 << 17) & _MASK64
    s2 ^= s0
    s3 ^= s1
    s1 ^= s2
    s0 ^= s3
    s2 ^= t
    s3 = _rotl_py(s3, 45)
    st[0], st[1], st[2], st[3] = s0, s1, s2, s3
    return result


def _with_py_state(state, body):
    st = [int(v) for v in state]
    out = body(st)
    state[:] = np.array(st, dtype=np.uint64)
    return out


def fill_uniform_numpy(state, n):
    def body(st):
        return np.array(
            [float(_next_u64_py(st) >> 11) * _INV_2_53 for _ in range(n)], dtype=np.float64
        )

    return _with_py_state(state, body)


def fill_normal_numpy(state, n):
    def body(st):
        out = np.empty(n)
        p = 0
        while p < n:
            u1 = float(_next_u64_py(st) >> 11) * _INV_2_53
            u2 = float(_next_u64_py(st) >> 11) * _INV_2_53
            r = math.sqrt(-2.0 * math.log(1.0 - u1))
            theta = _TWO_PI * u2
            out[p] = r * math.cos(theta)
            if p + 1 < n:
                out[p + 1] = r * math.sin(theta)
            p += 2
        return out

    return _with_py_state(state, body)


def partial_shuffle_numpy(state, n, m):
    def body(st):
        perm = list(range(n))
        for p in range(m):
            u = float(_next_u64_py(st) >> 11) * _INV_2_53
            q = p + int(u * (n - p))
            perm[p], perm[q] = perm[q], perm[p]
        return np.array(perm[:m], dtype=np.int64)

    return _with_py_state(state, body)


# ----------------------------------------------------------------------------
# nearest-seed (Voronoi) labelling of an h x w pixel grid
# ----------------------------------------------------------------------------


@njit(cache=True)
def voronoi_labels_numba(h, w, seed_rows, seed_cols):
    labels = np.empty(h * w, dtype=np.int64)
    r = seed_rows.size
    for j in range(w):
        for i in range(h):
            best = 0
            best_d = -1
            for q in range(r):
                di = i - seed_rows[q]
                dj = j - seed_cols[q]
                d = di * di + dj * dj
                if best_d < 0 or d < best_d:
                    best_d = d
                    best = q
            labels[j * h + i] = best
    return labels


def voronoi_labels_numpy(h, w, seed_rows, seed_cols):
    ii, jj = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
    ii = ii.ravel(order="F")[:, None]
    jj = jj.ravel(order="F")[:, None]
    d = (ii - seed_rows[None, :]) ** 2 + (jj - seed_cols[None, :]) ** 2
    # argmin returns the first minimum, i.e. the lowest seed index on ties
    return np.argmin(d, axis=1).astype(np.int64)


if USE_NUMBA:
    circ_diff = circ_diff_numba
    soft_threshold = soft_threshold_numba
    fill_uniform = fill_uniform_numba
    fill_normal = fill_normal_numba
    partial_shuffle = partial_shuffle_numba
    voronoi_labels = voronoi_labels_numba
else:
    circ_diff = circ_diff_numpy
    soft_threshold = soft_threshold_numpy
    fill_uniform = fill_uniform_numpy
    fill_normal = fill_normal_numpy
    partial_shuffle = partial_shuffle_numpy
    voronoi_labels = voronoi_labels_numpy
