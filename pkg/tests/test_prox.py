import numpy as np
import pytest

from ctvrpca.errors import ArgumentError
from ctvrpca.prox import soft_threshold, svt
from ctvrpca.tensor import UnfoldedMatrix, nuclear_norm


def prox_l1_objective(y, x, tau):
    return tau * np.abs(y).sum() + 0.5 * np.sum((y - x) ** 2)


def prox_nuc_objective(y, x, tau):
    return tau * np.linalg.svd(y, compute_uv=False).sum() + 0.5 * np.sum((y - x) ** 2)


def test_soft_threshold_closed_form():
    out = soft_threshold(np.array([1.5, -0.3, -2.0, 0.0]), 1.0)
    np.testing.assert_array_equal(out, [0.5, 0.0, -1.0, 0.0])


def test_soft_threshold_zero_tau_is_identity(rng):
    x = rng.standard_normal((6, 5))
    np.testing.assert_array_equal(soft_threshold(x, 0.0), x)


def test_soft_threshold_negative_tau():
    with pytest.raises(ArgumentError):
        soft_threshold(np.ones(3), -0.1)
    with pytest.raises(ArgumentError):
        svt(np.ones((3, 3)), -1.0)


def test_soft_threshold_keeps_provenance_and_layout(rng):
    m = UnfoldedMatrix(np.asfortranarray(rng.standard_normal((6, 5))), (2, 3, 5))
    out = soft_threshold(m, 0.3)
    assert out.dims == (2, 3, 5)
    np.testing.assert_array_equal(out.data, np.sign(m.data) * np.maximum(np.abs(m.data) - 0.3, 0))


def test_soft_threshold_beats_random_perturbations(rng):
    x = rng.standard_normal((6, 5))
    tau = 0.2
    y = soft_threshold(x, tau)
    best = prox_l1_objective(y, x, tau)
    for _ in range(1000):
        pert = y + rng.standard_normal(y.shape) * rng.choice([1e-3, 1e-2, 1e-1])
        assert prox_l1_objective(pert, x, tau) >= best


def test_svt_zero_tau_reconstructs(rng):
    x = rng.standard_normal((7, 4))
    res = svt(x, 0.0)
    assert np.linalg.norm(res.value - x) <= 1e-10 * np.linalg.norm(x)
    assert res.effective_rank == 4


def test_svt_large_tau_gives_zero(rng):
    x = rng.standard_normal((5, 4))
    s1 = np.linalg.svd(x, compute_uv=False)[0]
    res = svt(x, s1)
    assert np.all(res.value == 0.0)
    assert res.effective_rank == 0


def test_svt_diagonal_case():
    res = svt(np.diag([3.0, 1.0]), 2.0)
    np.testing.assert_allclose(res.value, np.diag([1.0, 0.0]), atol=1e-14)
    assert res.effective_rank == 1


def test_svt_singular_values_against_oracle(rng):
    for _ in range(20):
        x = rng.standard_normal((6, 5))
        res = svt(x, 0.5)
        expected = np.maximum(np.linalg.svd(x, compute_uv=False) - 0.5, 0.0)
        got = np.linalg.svd(res.value, compute_uv=False)
        np.testing.assert_allclose(got, expected, atol=1e-9)
        np.testing.assert_allclose(res.singular_values, expected, atol=1e-12)
        assert res.nuclear_norm == pytest.approx(nuclear_norm(res.value), abs=1e-9)
        assert res.effective_rank == int(np.count_nonzero(expected))


def test_svt_minimises_prox_objective(rng):
    x = rng.standard_normal((5, 4))
    y = svt(x, 0.7).value
    best = prox_nuc_objective(y, x, 0.7)
    for _ in range(300):
        pert = y + 1e-2 * rng.standard_normal(y.shape)
        assert prox_nuc_objective(pert, x, 0.7) >= best - 1e-12


def test_svt_result_invariants(rng):
    m = UnfoldedMatrix(rng.standard_normal((12, 5)), (3, 4, 5))
    res = svt(m, 1.0)
    assert isinstance(res.value, UnfoldedMatrix) and res.value.dims == m.dims
    assert res.effective_rank <= min(m.shape)
    assert nuclear_norm(res.value.data) <= nuclear_norm(m.data)


def test_nonexpansive(rng):
    for _ in range(30):
        a, b = rng.standard_normal((2, 6, 5))
        d = np.linalg.norm(a - b)
        assert np.linalg.norm(soft_threshold(a, 0.4) - soft_threshold(b, 0.4)) <= d + 1e-12
        assert np.linalg.norm(svt(a, 0.4).value - svt(b, 0.4).value) <= d + 1e-12


def test_svt_idempotent_at_zero(rng):
    x = rng.standard_normal((8, 6))
    y = svt(x, 0.9).value
    np.testing.assert_allclose(svt(y, 0.0).value, y, atol=1e-12)
