"""Tensor/matrix forms, circular difference operators and the norms built on them.

A *tensor* here is a real ``h x w x s`` numpy array.  Its buffer order is
column-major: element ``(i, j, k)`` sits at offset ``(k*w + j)*h + i``.  The
unfolded matrix has one row per pixel (``p = j*h + i``) and one column per band,
so unfolding is a reshape of that buffer and never reorders data.
"""

from dataclasses import dataclass

import numpy as np

from . import _instrument, _kernels
from .errors import NumericalError, ShapeError

PERIODIC = "periodic"


def _check_dims(dims):
    if len(dims) != 3:
        raise ShapeError(f"expected three extents (h, w, s), got {dims!r}")
    dims = tuple(int(d) for d in dims)
    if min(dims) < 1:
        raise ShapeError(f"tensor extents must be positive, got {dims}")
    return dims


@dataclass(frozen=True, eq=False)
class UnfoldedMatrix:
    """``hw x s`` matrix that remembers the tensor it came from."""

    data: np.ndarray
    dims: tuple

    def __post_init__(self):
        dims = _check_dims(self.dims)
        data = np.asarray(self.data, dtype=np.float64)
        h, w, s = dims
        if data.shape != (h * w, s):
            raise ShapeError(f"matrix of shape {data.shape} does not match dims {dims}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "data", data)

    @property
    def n1(self):
        return self.data.shape[0]

    @property
    def n2(self):
        return self.data.shape[1]

    @property
    def shape(self):
        return self.data.shape

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.data
        return self.data.astype(dtype)

    def with_data(self, data):
        return UnfoldedMatrix(data, self.dims)

    def __repr__(self):
        return f"UnfoldedMatrix(dims={self.dims}, n1={self.n1}, n2={self.n2})"


def unfold(t):
    """Mode-3 unfolding of a tensor into an :class:`UnfoldedMatrix`."""
    t = np.asarray(t, dtype=np.float64)
    if t.ndim != 3:
        raise ShapeError(f"expected a 3-way array, got ndim={t.ndim}")
    h, w, s = t.shape
    return UnfoldedMatrix(t.reshape((h * w, s), order="F"), (h, w, s))


def fold(m, dims=None):
    """Inverse of :func:`unfold`.

    ``m`` is an :class:`UnfoldedMatrix`, or a bare 2-D array together with
    explicit ``dims``.  A bare array without dims has no way to recover the
    spatial shape and raises :class:`ShapeError`.
    """
    if isinstance(m, UnfoldedMatrix):
        if dims is not None and _check_dims(dims) != m.dims:
            raise ShapeError(f"dims {tuple(dims)} disagree with provenance {m.dims}")
        data, dims = m.data, m.dims
    else:
        if dims is None:
            raise ShapeError("matrix carries no (h, w, s) provenance; pass dims")
        dims = _check_dims(dims)
        data = np.asarray(m, dtype=np.float64)
        if data.shape != (dims[0] * dims[1], dims[2]):
            raise ShapeError(f"matrix of shape {data.shape} does not match dims {dims}")
    return data.reshape(dims, order="F")


# -- difference operators ----------------------------------------------------


def diff_array(x, dims, mode, adjoint=False):
    """Raw-array form of the mode-``mode`` circular difference (or its adjoint).

    ``x`` is an ``hw x s`` array; the result has the same shape.
    """
    h, w, s = dims
    buf = np.ravel(x, order="F")
    out = _kernels.circ_diff(buf, h, w, s, mode - 1, adjoint)
    return out.reshape((h * w, s), order="F")


@dataclass(frozen=True)
class DiffOperator:
    """Forward circular difference along one tensor mode (1, 2 or 3).

    ``(D x)(p) = x(p + e_mode) - x(p)`` with wrap-around; the adjoint is
    ``y(p - e_mode) - y(p)``.
    """

    mode: int
    dims: tuple
    boundary: str = PERIODIC

    def __post_init__(self):
        if self.mode not in (1, 2, 3):
            raise ShapeError(f"mode must be 1, 2 or 3, got {self.mode!r}")
        if self.boundary != PERIODIC:
            raise ShapeError("only periodic boundaries are supported")
        object.__setattr__(self, "dims", _check_dims(self.dims))

    def _check(self, x):
        if not isinstance(x, UnfoldedMatrix):
            raise ShapeError("difference operators act on UnfoldedMatrix values")
        if x.dims != self.dims:
            raise ShapeError(f"operator dims {self.dims} do not match input dims {x.dims}")

    def apply(self, x):
        self._check(x)
        return x.with_data(diff_array(x.data, self.dims, self.mode))

    def adjoint(self, y):
        self._check(y)
        return y.with_data(diff_array(y.data, self.dims, self.mode, adjoint=True))


def grad(op, x):
    return op.apply(x)


def grad_adjoint(op, y):
    return op.adjoint(y)


def gradients(x):
    """The three gradient maps ``G_1, G_2, G_3`` of ``x``."""
    return [grad(DiffOperator(mode, x.dims), x) for mode in (1, 2, 3)]


# -- norms -------------------------------------------------------------------


def singular_values(a):
    a = np.asarray(a, dtype=np.float64)
    _instrument.bump("svd")
    try:
        return np.linalg.svd(a, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge: {exc}") from exc


def nuclear_norm(x):
    return float(np.sum(singular_values(x)))


def l1_norm(x):
    return float(np.sum(np.abs(np.asarray(x, dtype=np.float64))))


def tv3d_norm(t):
    """Anisotropic 3-D total variation: sum of the l1 norms of the gradient maps."""
    return sum(l1_norm(g.data) for g in gradients(unfold(t)))


def ctv_norm(x, mode):
    """Correlated total variation along one mode: nuclear norm of ``G_mode``."""
    return nuclear_norm(grad(DiffOperator(mode, x.dims), x).data)


def ctv3d_norm(x):
    return sum(ctv_norm(x, mode) for mode in (1, 2, 3))


def numerical_rank(a, rtol=1e-8):
    sv = singular_values(a)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.sum(sv > rtol * sv[0]))
