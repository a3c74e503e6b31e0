import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mixprod import (
    hadamard_extension,
    hadamard_product,
    kruskal_rank,
    random_model,
    rank_one_annihilator,
    sigma_k,
    sigma_k_cst_lower_bound,
    sigma_k_lower_bound,
    vandermonde,
)
from mixprod.errors import DimensionMismatch, EnumerationLimit


def naive_extension(rows):
    rows = np.asarray(rows, dtype=float)
    r, k = rows.shape
    out = np.ones((1 << r, k))
    for mask in range(1 << r):
        for b in range(r):
            if mask >> b & 1:
                out[mask] *= rows[b]
    return out


def test_hadamard_product_examples(rng):
    u = rng.uniform(size=5)
    v = rng.uniform(size=5)
    assert np.array_equal(hadamard_product(u, np.ones(5)), u)
    assert hadamard_product([1, 2], [3, 4]).tolist() == [3, 8]
    assert np.array_equal(hadamard_product(u, v), hadamard_product(v, u))
    with pytest.raises(DimensionMismatch):
        hadamard_product([1, 2], [1, 2, 3])


def test_extension_examples():
    H = hadamard_extension([[0.3, 0.6]])
    assert H.data.tolist() == [[1, 1], [0.3, 0.6]]
    H = hadamard_extension([[0.2, 0.8], [0.5, 0.5]])
    assert np.allclose(H.data, [[1, 1], [0.2, 0.8], [0.5, 0.5], [0.1, 0.4]], rtol=0, atol=1e-17)
    assert np.array_equal(hadamard_extension(np.ones((4, 3))).data, np.ones((16, 3)))
    assert np.array_equal(np.asarray(H), H.data)
    assert np.array_equal(H.row([0, 1]), H.data[3])


def test_extension_cap():
    with pytest.raises(EnumerationLimit):
        hadamard_extension(np.ones((25, 1)))


@pytest.mark.parametrize("r", [1, 3, 6, 10])
def test_extension_matches_naive_products(r, rng):
    rows = rng.uniform(size=(r, 3))
    assert np.allclose(hadamard_extension(rows).data, naive_extension(rows), rtol=1e-15, atol=0)


dyadic = st.integers(0, 64).map(lambda x: x / 64)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 10).flatmap(lambda r: st.lists(st.lists(dyadic, min_size=3, max_size=3), min_size=r, max_size=r)))
def test_multiplicativity_is_exact(rows):
    """Disjoint A, B: row(A | B) == row(A) * row(B) bit for bit.

    Dyadic entries with few significant bits keep every product exact, so
    the identity holds without any tolerance.
    """
    H = hadamard_extension(rows)
    r = H.r
    assert np.array_equal(H.data[0], np.ones(3))
    for i in range(r):
        assert np.array_equal(H.data[1 << i], np.asarray(rows[i], dtype=float))
    full = (1 << r) - 1
    for A in range(1 << r):
        rest = full & ~A
        B = rest
        while True:
            assert np.array_equal(H.data[A | B], H.data[A] * H.data[B])
            if B == 0:
                break
            B = (B - 1) & rest


def test_vandermonde_examples():
    assert vandermonde([1, 2], 2).tolist() == [[1, 1], [1, 2]]
    assert vandermonde([0, 0.3], 2).tolist() == [[1, 1], [0, 0.3]]
    assert vandermonde([1, 2, 3], 3).tolist() == [[1, 1, 1], [1, 2, 3], [1, 4, 9]]
    assert vandermonde([0.0], 1).tolist() == [[1.0]]


def test_annihilator_examples():
    a, b = 0.3, 0.7
    h = rank_one_annihilator([[a, b]])
    assert h.tolist() == [a, -1]
    assert h @ hadamard_extension([[a, b]]).data[:, 0] == 0.0

    m = np.array([[0.1, 0.5, 0.9], [0.2, 0.6, 0.4]])
    inner = rank_one_annihilator(m) @ hadamard_extension(m).data
    assert np.allclose(inner[:2], 0, atol=1e-15)
    # (m11 - m13)(m22 - m23) = (0.1 - 0.9)(0.6 - 0.4)
    assert inner[2] == pytest.approx(-0.16, rel=1e-12)

    h = rank_one_annihilator([[0.4, 0.4]])
    assert np.allclose(h @ hadamard_extension([[0.4, 0.4]]).data, [0, 0], atol=0)


def test_annihilator_entries_follow_bitmask_convention(rng):
    m = rng.uniform(size=(3, 4))
    h = rank_one_annihilator(m)
    for mask in range(8):
        outside = [i for i in range(3) if not mask >> i & 1]
        expected = (-1) ** bin(mask).count("1") * np.prod([m[i, i] for i in outside])
        assert h[mask] == pytest.approx(expected, rel=1e-15)
    with pytest.raises(DimensionMismatch):
        rank_one_annihilator(np.ones((2, 2)))


@pytest.mark.parametrize("k", [2, 3, 4, 5, 6])
def test_annihilator_accuracy_relative_to_term_magnitudes(k, rng):
    """Inner products vanish or equal the product formula up to rounding in the summed terms."""
    for _ in range(200):
        m = rng.uniform(size=(k - 1, k))
        h = rank_one_annihilator(m)
        H = hadamard_extension(m).data
        inner = h @ H
        scale = np.abs(h) @ np.abs(H)
        eps = np.finfo(float).eps
        assert np.all(np.abs(inner[:-1]) <= 4 * k * eps * scale[:-1])
        target = np.prod(np.diag(m) - m[:, -1])
        assert abs(inner[-1] - target) <= 4 * k * eps * scale[-1]
        assert np.all(np.abs(inner[:-1]) <= 1e-12 * np.linalg.norm(h) * 2 ** (k / 2))


def test_sigma_bound_examples():
    assert sigma_k_lower_bound(1, 0.3) == 1.0
    assert sigma_k_lower_bound(2, 2 * math.sqrt(5)) == pytest.approx(1 / math.sqrt(2))
    assert sigma_k_lower_bound(2, 0.6) == pytest.approx(0.6 / (2 * math.sqrt(10)), rel=1e-14)
    assert sigma_k_cst_lower_bound(1, 0.5, 1.0) == 1.0
    assert sigma_k_cst_lower_bound(2, 2 * math.sqrt(5), 0.5) == pytest.approx(0.25)
    expected = (0.1 / 3) * (0.2 / (2 * math.sqrt(5))) ** 4
    assert sigma_k_cst_lower_bound(3, 0.2, 0.1) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("k", [2, 3, 4, 5, 6])
def test_sigma_k_exceeds_bound(k):
    for seed in range(40):
        for zeta in (0.05, 1.0 / (k - 1)):
            m = random_model(k, k - 1, zeta, 0.01, seed).m
            assert sigma_k(hadamard_extension(m).data, k) > sigma_k_lower_bound(k, zeta)


@pytest.mark.parametrize("k", [2, 3, 4])
def test_rank_one_witness_sampling(k, rng):
    """Random rank-one h = H(g) never beat the separation-based bound on ||h^T H(m)|| / ||h||."""
    zeta = 0.2
    bound = (zeta / (2 * math.sqrt(5))) ** (k - 1)
    for seed in range(5):
        H = hadamard_extension(random_model(k, k - 1, zeta, 0.01, seed).m).data
        for _ in range(1000):
            g = rng.standard_normal((k - 1, 2))
            h = np.ones(1)
            for b in range(k - 2, -1, -1):
                h = np.kron(g[b], h)
            assert np.linalg.norm(h @ H) / np.linalg.norm(h) > bound


def test_kruskal_examples():
    assert kruskal_rank(np.eye(4)) == 4
    assert kruskal_rank([[1, 1, 0], [2, 2, 1]]) == 1
    assert kruskal_rank([[1, 0, 1], [0, 1, 1]]) == 2
    assert kruskal_rank(np.zeros((2, 2))) == 0
    with pytest.raises(EnumerationLimit):
        kruskal_rank(np.ones((2, 13)))


def test_kruskal_of_separated_extension_is_full(rng):
    for k in (2, 3, 4):
        m = random_model(k, k - 1, 0.2, 0.1, int(rng.integers(1 << 30))).m
        assert kruskal_rank(hadamard_extension(m).data) == k
