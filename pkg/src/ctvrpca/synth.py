"""Synthetic low-rank, locally smooth ground truth plus sparse +/-1 corruption.

Generation order (which fixes how the random stream is consumed):

1. ``r`` distinct seed pixels, uniform over the ``h x w`` grid;
2. an ``r x r`` block of N(0, 1/(hw)) region coefficients;
3. an ``r x s`` block of N(0, 1) base rows, each then moving-averaged;
4. the corruption support, ``round(rho_s * hw * s)`` linear indices;
5. one sign per support entry;
6. optional Gaussian noise for every entry.

Every pixel joins the region of its nearest seed (squared Euclidean distance on
integer coordinates, ties to the lowest seed index), so the coefficient matrix
``U`` is piecewise constant over the image.  Each column of ``X0 = U V`` is then
min-max normalised to [0, 1]; constant columns become 0.
"""

from dataclasses import asdict, dataclass

import numpy as np

from . import _kernels
from .errors import ArgumentError
from .rng import PRNGStream
from .tensor import UnfoldedMatrix


@dataclass(frozen=True)
class SyntheticSpec:
    h: int = 20
    w: int = 20
    s: int = 200
    r: int = 20
    rho_s: float = 0.05
    gaussian_sigma: float = 0.0
    seed: int = 0
    smoother_window: int = 5

    def validate(self):
        for name in ("h", "w", "s"):
            if int(getattr(self, name)) < 1:
                raise ArgumentError(f"{name} must be a positive integer")
        n1 = self.h * self.w
        if self.r < 1:
            raise ArgumentError("rank r must be at least 1")
        if self.r > n1:
            raise ArgumentError(f"rank r={self.r} exceeds the number of pixels {n1}")
        if self.r > min(n1, self.s):
            raise ArgumentError(f"rank r={self.r} exceeds min(hw, s)={min(n1, self.s)}")
        if not 0.0 <= self.rho_s < 1.0:
            raise ArgumentError(f"rho_s must lie in [0, 1), got {self.rho_s}")
        if not self.gaussian_sigma >= 0.0:
            raise ArgumentError("gaussian_sigma must be nonnegative")
        if self.smoother_window < 1 or self.smoother_window % 2 == 0:
            raise ArgumentError("smoother_window must be an odd positive integer")
        return self

    @property
    def dims(self):
        return (self.h, self.w, self.s)

    @property
    def support_size(self):
        return int(np.floor(self.rho_s * self.h * self.w * self.s + 0.5))

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True, eq=False)
class SyntheticInstance:
    spec: SyntheticSpec
    X0: UnfoldedMatrix
    S0: UnfoldedMatrix
    M: UnfoldedMatrix
    support: np.ndarray  # sorted linear indices into the column-major buffer
    labels: np.ndarray  # region index per pixel row

    @property
    def true_rank_upper(self):
        # min-max normalisation adds a per-column offset: rank can grow by one
        return self.spec.r + 1


def moving_average(v, window):
    """Centred moving average along the last axis with edge replication."""
    if window == 1:
        return np.array(v, dtype=np.float64)
    half = window // 2
    padded = np.pad(v, [(0, 0)] * (v.ndim - 1) + [(half, half)], mode="edge")
    csum = np.cumsum(padded, axis=-1)
    csum = np.concatenate([np.zeros(v.shape[:-1] + (1,)), csum], axis=-1)
    return (csum[..., window:] - csum[..., :-window]) / window


def minmax_columns(x):
    lo = x.min(axis=0)
    span = x.max(axis=0) - lo
    out = np.zeros_like(x)
    ok = span > 0
    out[:, ok] = (x[:, ok] - lo[ok]) / span[ok]
    return out


def generate(spec):
    """Build a :class:`SyntheticInstance`; a pure function of ``spec``."""
    spec.validate()
    h, w, s, r = spec.h, spec.w, spec.s, spec.r
    n1 = h * w
    rng = PRNGStream(spec.seed)

    seeds = rng.choice_without_replacement(n1, r)
    labels = _kernels.voronoi_labels(h, w, seeds % h, seeds // h)

    coeffs = rng.normal(r * r).reshape((r, r)) * np.sqrt(1.0 / n1)
    u = coeffs[labels]
    v = moving_average(rng.normal(r * s).reshape((r, s)), spec.smoother_window)
    x0 = minmax_columns(u @ v)

    m = spec.support_size
    omega = rng.choice_without_replacement(n1 * s, m)
    s0 = np.zeros(n1 * s)
    s0[omega] = rng.signs(m)
    s0 = s0.reshape((n1, s), order="F")

    mat = x0 + s0
    if spec.gaussian_sigma > 0:
        noise = rng.normal(n1 * s).reshape((n1, s), order="F")
        mat = mat + spec.gaussian_sigma * noise

    dims = spec.dims
    return SyntheticInstance(
        spec=spec,
        X0=UnfoldedMatrix(x0, dims),
        S0=UnfoldedMatrix(s0, dims),
        M=UnfoldedMatrix(mat, dims),
        support=np.sort(omega),
        labels=labels,
    )
