"""FFT solve of ``(mu I + mu sum_n D_n^T D_n) X = B`` for periodic differences.

Circular difference operators are convolutions, so the normal operator is
diagonal in the 3-D Fourier basis with eigenvalues ``1 + Tx`` (times ``mu``),
where ``Tx = sum_n |F(D_n)|^2``.
"""

from dataclasses import dataclass

import numpy as np

from . import _instrument
from .errors import ArgumentError, NumericalError, ShapeError
from .tensor import UnfoldedMatrix, _check_dims, diff_array

IMAG_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class KernelSpectra:
    dims: tuple
    dhat: tuple  # F(D_1), F(D_2), F(D_3), complex (h, w, s) arrays
    tx: np.ndarray  # sum_n |F(D_n)|^2, real and nonnegative


def difference_kernel(dims, mode):
    """Spatial kernel whose circular convolution is the forward difference.

    ``(k * x)(p) = x(p + e) - x(p)`` needs ``k(0) = -1`` and ``k(-e) = +1``; the
    ``-e`` shift lands on the last index of that axis.  An axis of length one
    gives the zero kernel.
    """
    k = np.zeros(dims)
    k[0, 0, 0] -= 1.0
    idx = [0, 0, 0]
    idx[mode - 1] = dims[mode - 1] - 1
    k[tuple(idx)] += 1.0
    return k


def build_spectra(h, w, s):
    dims = _check_dims((h, w, s))
    dhat = tuple(np.fft.fftn(difference_kernel(dims, mode)) for mode in (1, 2, 3))
    tx = sum(np.abs(d) ** 2 for d in dhat)
    for d in dhat:
        d.setflags(write=False)
    tx.setflags(write=False)
    return KernelSpectra(dims, dhat, tx)


def _arr(x, dims, name):
    data = x.data if isinstance(x, UnfoldedMatrix) else np.asarray(x, dtype=np.float64)
    if isinstance(x, UnfoldedMatrix) and x.dims != dims:
        raise ShapeError(f"{name}: dims {x.dims} do not match spectra dims {dims}")
    if data.shape != (dims[0] * dims[1], dims[2]):
        raise ShapeError(f"{name}: shape {data.shape} does not match spectra dims {dims}")
    return data


def _fftn(a, dims):
    _instrument.bump("fft_forward")
    return np.fft.fftn(a.reshape(dims, order="F"))


def _ifftn(a):
    _instrument.bump("fft_inverse")
    return np.fft.ifftn(a)


def _finish(spec, dims):
    out = _ifftn(spec)
    real = out.real
    imag = np.max(np.abs(out.imag)) if out.size else 0.0
    if imag > IMAG_TOL * max(np.linalg.norm(real), 1.0):
        raise NumericalError(f"inverse FFT left an imaginary residue of {imag:.3e}")
    return real.reshape((dims[0] * dims[1], dims[2]), order="F")


def solve_x_array(spectra, m_minus_s, g_terms, gamma_terms, mu, assemble="spatial"):
    """Array-level core of :func:`solve_x`; returns an ``hw x s`` ndarray.

    ``assemble="spatial"`` forms the whole right-hand side in the pixel domain
    (adjoint differences are cheap) and uses one forward and one inverse FFT.
    ``assemble="fourier"`` instead transforms each ``mu G_n - Gamma_n`` and
    applies ``conj(F(D_n))`` in the frequency domain.  Both give the same X.
    """
    mu = float(mu)
    if not mu > 0.0:
        raise ArgumentError(f"mu must be positive, got {mu}")
    dims = spectra.dims
    if len(g_terms) != 3 or len(gamma_terms) != 4:
        raise ShapeError("need three G terms and four multiplier terms")
    base = mu * _arr(m_minus_s, dims, "M-S") + _arr(gamma_terms[3], dims, "Gamma4")
    pieces = [
        mu * _arr(g_terms[n], dims, f"G{n + 1}") - _arr(gamma_terms[n], dims, f"Gamma{n + 1}")
        for n in range(3)
    ]
    denom = mu * (1.0 + spectra.tx)
    if assemble == "spatial":
        rhs = base
        for n, piece in enumerate(pieces):
            rhs = rhs + diff_array(piece, dims, n + 1, adjoint=True)
        spec = _fftn(rhs, dims)
    elif assemble == "fourier":
        spec = _fftn(base, dims)
        for n, piece in enumerate(pieces):
            spec = spec + np.conj(spectra.dhat[n]) * _fftn(piece, dims)
    else:
        raise ArgumentError(f"unknown assembly mode {assemble!r}")
    return _finish(spec / denom, dims)


def solve_x(spectra, m_minus_s_term, g_terms, gamma_terms, mu, assemble="spatial"):
    """Exact X-update of the ADMM iteration.

    Returns the unique X with
    ``(mu I + mu sum D_n^T D_n) X = mu (M - S) + Gamma_4 + sum_n D_n^T (mu G_n - Gamma_n)``.
    """
    data = solve_x_array(spectra, m_minus_s_term, g_terms, gamma_terms, mu, assemble)
    return UnfoldedMatrix(data, spectra.dims)
