"""Proximal maps of the l1 norm and the nuclear norm."""

from dataclasses import dataclass

import numpy as np

from . import _instrument, _kernels
from .errors import ArgumentError, NumericalError
from .tensor import UnfoldedMatrix


def _check_tau(tau):
    tau = float(tau)
    if not tau >= 0.0:
        raise ArgumentError(f"threshold must be nonnegative, got {tau}")
    return tau


def soft_threshold_array(x, tau):
    x = np.asarray(x, dtype=np.float64)
    order = "F" if x.flags.f_contiguous else "C"
    out = _kernels.soft_threshold(np.ravel(x, order=order), tau)
    return out.reshape(x.shape, order=order)


def soft_threshold(x, tau):
    """Entrywise ``sign(x) * max(|x| - tau, 0)``.

    Works on an :class:`UnfoldedMatrix` (provenance is kept) or any array.
    """
    tau = _check_tau(tau)
    if isinstance(x, UnfoldedMatrix):
        return x.with_data(soft_threshold_array(x.data, tau))
    return soft_threshold_array(x, tau)


@dataclass(frozen=True)
class SvtResult:
    value: object
    effective_rank: int
    # thresholded singular values, so callers get ||value||_* without another SVD
    singular_values: np.ndarray

    @property
    def nuclear_norm(self):
        return float(np.sum(self.singular_values))


def svt_array(x, tau):
    x = np.asarray(x, dtype=np.float64)
    _instrument.bump("svd")
    try:
        u, sv, vt = np.linalg.svd(x, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge: {exc}") from exc
    shrunk = np.maximum(sv - tau, 0.0)
    keep = int(np.count_nonzero(shrunk))
    value = (u[:, :keep] * shrunk[:keep]) @ vt[:keep]
    return value, keep, shrunk


def svt(x, tau):
    """Singular value thresholding ``U max(S - tau, 0) V^T`` via an economy SVD."""
    tau = _check_tau(tau)
    data = x.data if isinstance(x, UnfoldedMatrix) else x
    value, keep, shrunk = svt_array(data, tau)
    if isinstance(x, UnfoldedMatrix):
        value = x.with_data(value)
    return SvtResult(value, keep, shrunk)
