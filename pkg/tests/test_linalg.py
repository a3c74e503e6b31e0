import math

import numpy as np
import pytest

from mixprod import eig_real, hadamard_extension, sigma_k, solve, svd
from mixprod.errors import ComplexSpectrum, NearSingular, NonFiniteInput

SIZES = [(1, 1), (2, 2), (3, 5), (5, 3), (4, 4), (8, 6), (8, 8), (12, 16), (16, 12), (16, 16)]


def test_svd_examples():
    assert np.allclose(svd(np.eye(2)).Sigma, [1, 1])
    assert np.allclose(svd(np.diag([3.0, 2.0])).Sigma, [3, 2])
    assert np.allclose(svd(np.ones((2, 2))).Sigma, [2, 0], atol=1e-15)


def test_svd_rejects_non_finite():
    with pytest.raises(NonFiniteInput):
        svd([[1.0, np.inf], [0.0, 1.0]])


@pytest.mark.parametrize("shape", SIZES)
def test_svd_contract(shape, rng):
    for _ in range(20):
        A = rng.standard_normal(shape)
        res = svd(A)
        assert np.all(np.diff(res.Sigma) <= 0) and np.all(res.Sigma >= 0)
        assert np.abs(res.U.T @ res.U - np.eye(shape[0])).max() <= 1e-10
        assert np.abs(res.V.T @ res.V - np.eye(shape[1])).max() <= 1e-10
        p = res.Sigma.size
        recon = (res.U[:, :p] * res.Sigma) @ res.V[:, :p].T
        assert np.linalg.norm(A - recon, 2) <= res.backward_error
        assert res.backward_error <= 1e-10 * np.linalg.norm(A, 2)


def test_sigma_k_examples():
    assert sigma_k(np.diag([3.0, 2.0]), 2) == pytest.approx(2.0)
    assert sigma_k(np.ones((2, 2)), 2) == pytest.approx(0.0, abs=1e-15)
    H = hadamard_extension([[0.0, 1.0]]).data
    assert sigma_k(H, 2) == pytest.approx(math.sqrt((3 - math.sqrt(5)) / 2), abs=1e-14)
    with pytest.raises(ValueError):
        sigma_k(np.eye(2), 3)
    with pytest.raises(ValueError):
        sigma_k(np.eye(2), 0)


@pytest.mark.parametrize("shape", SIZES)
def test_weyl_perturbation(shape, rng):
    for _ in range(100):
        A = rng.standard_normal(shape)
        E = rng.standard_normal(shape) * 10.0 ** rng.uniform(-8, 0)
        bound = np.linalg.norm(E, 2) + 1e-10
        sa, sb = svd(A).Sigma, svd(A + E).Sigma
        assert np.all(np.abs(sa - sb) <= bound)


@pytest.mark.parametrize("shape", SIZES)
def test_eckart_young_truncation(shape, rng):
    for _ in range(100):
        A = rng.standard_normal(shape)
        res = svd(A)
        p = res.Sigma.size
        for r in range(p + 1):
            resid = np.linalg.norm(A - res.truncate(r), 2)
            expected = res.Sigma[r] if r < p else 0.0
            assert abs(resid - expected) <= 1e-10


def test_eig_real_examples():
    res = eig_real(np.diag([0.8, 0.2]))
    assert np.allclose(res.eigenvalues, [0.8, 0.2])
    assert np.allclose(res.eigenvectors, np.eye(2))

    with pytest.raises(ComplexSpectrum):
        eig_real(np.array([[0.0, 1.0], [-1.0, 0.0]]), imag_tol=0.5)

    P = np.array([[1.0, 1.0], [0.0, 1.0]])
    A = P @ np.diag([0.1, 0.9]) @ np.linalg.inv(P)
    assert np.allclose(eig_real(A).eigenvalues, [0.9, 0.1], atol=1e-14)


def test_eig_real_rejects_non_square_and_non_finite():
    with pytest.raises(ValueError):
        eig_real(np.ones((2, 3)))
    with pytest.raises(NonFiniteInput):
        eig_real([[np.nan, 0.0], [0.0, 1.0]])


@pytest.mark.parametrize("k", [1, 2, 3, 5, 8, 12, 16])
def test_eig_real_on_diagonalizable_matrices(k, rng):
    for _ in range(50):
        vals = rng.uniform(-1, 1, k)
        P = rng.standard_normal((k, k)) + 3 * np.eye(k)
        A = P @ np.diag(vals) @ np.linalg.inv(P)
        res = eig_real(A)
        assert np.all(np.diff(res.eigenvalues) <= 0)
        assert np.allclose(np.linalg.norm(res.eigenvectors, axis=0), 1.0)
        assert res.max_defect <= 1e-8 * np.linalg.norm(A, 2)
        assert np.allclose(res.eigenvalues, np.sort(vals)[::-1], atol=1e-8)


def test_solve_examples(rng):
    b = np.array([0.3, -1.2])
    assert np.array_equal(solve(np.eye(2), b), b)
    assert np.allclose(solve(np.diag([2.0, 4.0]), [2.0, 4.0]), [1.0, 1.0])

    Q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
    A = Q @ np.diag([2.0, 1.5, 1.0, 0.5]) @ Q.T
    x = rng.standard_normal(4)
    assert np.allclose(solve(A, A @ x), x, rtol=1e-10, atol=0)


def test_solve_residual_contract(rng):
    for k in (1, 3, 8, 16):
        A = rng.standard_normal((k, k))
        b = rng.standard_normal(k)
        x = solve(A, b)
        s = np.linalg.svd(A, compute_uv=False)
        assert np.linalg.norm(A @ x - b) <= 1e-10 * (s[0] * np.linalg.norm(x) + np.linalg.norm(b))


def test_solve_near_singular():
    with pytest.raises(NearSingular) as info:
        solve(np.ones((2, 2)), [1.0, 1.0])
    assert info.value.ratio < 1e-13
