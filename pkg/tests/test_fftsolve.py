import numpy as np
import pytest

from ctvrpca.errors import ArgumentError, ShapeError
from ctvrpca.fftsolve import build_spectra, solve_x
from ctvrpca.tensor import DiffOperator, UnfoldedMatrix, fold, grad, grad_adjoint
from oracles import dense_diff_matrix, random_unfolded, vec


def normal_operator(dims):
    n = int(np.prod(dims))
    return np.eye(n) + sum(dense_diff_matrix(dims, m).T @ dense_diff_matrix(dims, m) for m in (1, 2, 3))


def random_terms(rng, dims):
    return (
        random_unfolded(rng, dims),
        [random_unfolded(rng, dims) for _ in range(3)],
        [random_unfolded(rng, dims) for _ in range(4)],
    )


def rhs_spatial(dims, mms, g, gam, mu):
    """Right-hand side assembled with the dense operator matrices."""
    b = mu * vec(mms) + vec(gam[3])
    for n in range(3):
        A = dense_diff_matrix(dims, n + 1)
        b = b + A.T @ (mu * vec(g[n]) - vec(gam[n]))
    return b


def test_singleton_spectra():
    sp = build_spectra(1, 1, 1)
    assert np.all(sp.tx == 0.0)


def test_two_point_dft():
    sp = build_spectra(2, 1, 1)
    np.testing.assert_allclose(np.abs(sp.dhat[0].ravel()) ** 2, [0.0, 4.0], atol=1e-15)


def test_spectra_invariants():
    sp = build_spectra(4, 3, 5)
    assert np.all(sp.tx >= 0)
    assert sp.tx[0, 0, 0] == 0.0
    np.testing.assert_allclose(sp.tx, sum(np.abs(d) ** 2 for d in sp.dhat), atol=1e-12)


def test_tx_matches_dense_eigenvalues():
    dims = (4, 3, 5)
    K = normal_operator(dims) - np.eye(60)
    eig = np.sort(np.linalg.eigvalsh(K))
    np.testing.assert_allclose(np.sort(build_spectra(*dims).tx.ravel()), eig, atol=1e-9)


@pytest.mark.parametrize("mode", [1, 2, 3])
def test_fourier_application_matches_spatial_grad(rng, mode):
    dims = (4, 3, 5)
    sp = build_spectra(*dims)
    x = random_unfolded(rng, dims)
    via_fft = np.fft.ifftn(sp.dhat[mode - 1] * np.fft.fftn(fold(x))).real
    np.testing.assert_allclose(via_fft, fold(grad(DiffOperator(mode, dims), x)), atol=1e-12)
    via_fft_adj = np.fft.ifftn(np.conj(sp.dhat[mode - 1]) * np.fft.fftn(fold(x))).real
    np.testing.assert_allclose(via_fft_adj, fold(grad_adjoint(DiffOperator(mode, dims), x)), atol=1e-12)


def test_reduces_to_plain_system_residual(rng):
    dims = (4, 4, 3)
    sp = build_spectra(*dims)
    mms = random_unfolded(rng, dims)
    zeros = UnfoldedMatrix(np.zeros((16, 3)), dims)
    x = solve_x(sp, mms, [zeros] * 3, [zeros] * 4, 1.0)
    resid = normal_operator(dims) @ vec(x) - vec(mms)
    assert np.linalg.norm(resid) <= 1e-9 * np.linalg.norm(vec(mms))


def test_constant_right_hand_side_is_fixed():
    dims = (3, 4, 2)
    c = UnfoldedMatrix(np.full((12, 2), 0.75), dims)
    zeros = UnfoldedMatrix(np.zeros((12, 2)), dims)
    x = solve_x(build_spectra(*dims), c, [zeros] * 3, [zeros] * 4, 2.0)
    np.testing.assert_allclose(x.data, c.data, atol=1e-14)


@pytest.mark.parametrize("dims", [(3, 3, 2), (4, 4, 3)])
@pytest.mark.parametrize("assemble", ["spatial", "fourier"])
def test_matches_dense_solve(rng, dims, assemble):
    sp = build_spectra(*dims)
    A = normal_operator(dims)
    for _ in range(10):
        mu = float(rng.uniform(0.1, 10.0))
        mms, g, gam = random_terms(rng, dims)
        b = rhs_spatial(dims, mms, g, gam, mu)
        x_ref = np.linalg.solve(mu * A, b)
        x = vec(solve_x(sp, mms, g, gam, mu, assemble=assemble))
        assert np.linalg.norm(x - x_ref) <= 1e-8 * np.linalg.norm(x_ref)
        assert np.linalg.norm(mu * A @ x - b) <= 1e-9 * np.linalg.norm(b)


def test_linear_in_inputs(rng):
    dims = (3, 4, 3)
    sp = build_spectra(*dims)
    t1, t2 = random_terms(rng, dims), random_terms(rng, dims)
    a, b = 0.3, -1.7

    def comb(u, v):
        return UnfoldedMatrix(a * u.data + b * v.data, dims)

    mix = (comb(t1[0], t2[0]), [comb(p, q) for p, q in zip(t1[1], t2[1])],
           [comb(p, q) for p, q in zip(t1[2], t2[2])])
    lhs = solve_x(sp, *mix, 1.5).data
    rhs = a * solve_x(sp, *t1, 1.5).data + b * solve_x(sp, *t2, 1.5).data
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_argument_errors(rng):
    dims = (3, 3, 2)
    sp = build_spectra(*dims)
    mms, g, gam = random_terms(rng, dims)
    with pytest.raises(ArgumentError):
        solve_x(sp, mms, g, gam, 0.0)
    with pytest.raises(ShapeError):
        solve_x(sp, random_unfolded(rng, (3, 2, 3)), g, gam, 1.0)
    with pytest.raises(ShapeError):
        solve_x(sp, mms, g[:2], gam, 1.0)
