"""Hadamard extensions, Vandermonde matrices and the condition-number certificates.

Subsets of source rows are bitmasks in ascending integer order (bit ``b`` is
row ``b``); every module uses this convention for moment vectors as well.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import kernels
from .errors import DimensionMismatch, EnumerationLimit

MAX_EXTENSION_ROWS = 24
MAX_KRUSKAL_COLUMNS = 12
KRUSKAL_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class HadamardExtension:
    """The ``2**r x k`` matrix whose row ``S`` is the entrywise product of the source rows in ``S``."""

    r: int
    k: int
    data: np.ndarray

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)

    def row(self, subset) -> np.ndarray:
        mask = 0
        for i in subset:
            mask |= 1 << i
        return self.data[mask]


def hadamard_product(u, v) -> np.ndarray:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise DimensionMismatch(f"Hadamard product of lengths {u.size} and {v.size}")
    return u * v


def hadamard_extension(rows) -> HadamardExtension:
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim == 1:
        rows = rows.reshape(1, -1)
    r, k = rows.shape
    if r > MAX_EXTENSION_ROWS:
        raise EnumerationLimit(f"Hadamard extension of {r} rows exceeds the cap of {MAX_EXTENSION_ROWS}")
    return HadamardExtension(r=r, k=k, data=kernels.hadamard_extension(rows))


def vandermonde(nodes, r: int) -> np.ndarray:
    """``V[i, j] = nodes[j] ** i`` for ``i = 0 .. r-1`` (with ``0 ** 0 = 1``)."""
    nodes = np.asarray(nodes, dtype=np.float64)
    return np.vander(nodes, N=r, increasing=True).T.copy()


def rank_one_annihilator(m) -> np.ndarray:
    """Rank-one vector ``h`` with ``h[S] = (-1)**|S| * prod_{i not in S} m[i, i]``.

    For a ``(k-1) x k`` matrix ``m``, ``h @ H(m)[:, j] = prod_i (m[i, i] - m[i, j])``,
    which vanishes for the first ``k-1`` columns.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[1] != m.shape[0] + 1:
        raise DimensionMismatch(f"expected a (k-1) x k matrix, got shape {m.shape}")
    r = m.shape[0]
    h = np.ones(1)
    for b in range(r - 1, -1, -1):
        nxt = np.empty(2 * h.size)
        nxt[0::2] = m[b, b] * h
        nxt[1::2] = -h
        h = nxt
    return h


def sigma_k_lower_bound(k: int, zeta: float) -> float:
    return (zeta / (2.0 * math.sqrt(5.0))) ** (k - 1) / math.sqrt(k)


def sigma_k_cst_lower_bound(k: int, zeta: float, pi_min: float) -> float:
    return pi_min * sigma_k_lower_bound(k, zeta) ** 2


def kruskal_rank(A) -> int:
    """Largest ``r`` such that every ``r`` columns of ``A`` are linearly independent.

    A column set counts as independent when its ``r``-th singular value exceeds
    ``1e-9`` times the largest singular value of the whole matrix.
    """
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    ncols = A.shape[1]
    if ncols > MAX_KRUSKAL_COLUMNS:
        raise EnumerationLimit(f"Kruskal rank of {ncols} columns exceeds the cap of {MAX_KRUSKAL_COLUMNS}")
    if A.size == 0:
        return 0
    scale = np.linalg.norm(A, 2)
    if scale == 0:
        return 0
    threshold = KRUSKAL_RTOL * scale
    rank = 0
    for r in range(1, min(ncols, A.shape[0]) + 1):
        for cols in combinations(range(ncols), r):
            s = np.linalg.svd(A[:, cols], compute_uv=False)
            if s[r - 1] <= threshold:
                return rank
        rank = r
    return rank
