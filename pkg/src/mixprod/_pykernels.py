"""Numpy implementations of the subset-indexed kernels.

These are the reference versions; ``_ckernels.pyx`` must agree with them
bit for bit.  Subsets are bitmasks in ascending integer order, bit ``b``
standing for source row ``b``.
"""
import numpy as np


def hadamard_extension(rows):
    """Rows ``out[S] = prod_{b in S} rows[b]`` for every bitmask ``S``.

    Each product is formed as ``out[S] = rows[low(S)] * out[S - low(S)]``
    so that both backends round identically.
    """
    rows = np.ascontiguousarray(rows, dtype=np.float64)
    r, k = rows.shape
    out = np.ones((1, k))
    for b in range(r - 1, -1, -1):
        nxt = np.empty((2 * out.shape[0], k))
        nxt[0::2] = out
        nxt[1::2] = out * rows[b]
        out = nxt
    return out


def superset_sums(counts, n):
    """In-place superset-sum (zeta) transform of an int64 vector of length 2**n."""
    for b in range(n):
        view = counts.reshape(-1, 2, 1 << b)
        view[:, 0, :] += view[:, 1, :]
    return counts


def support_histogram(data):
    """Count, for every bitmask, how many binary samples have exactly that support."""
    data = np.asarray(data)
    n_samples, n = data.shape
    weights = np.left_shift(np.int64(1), np.arange(n, dtype=np.int64))
    masks = data.astype(np.int64) @ weights
    return np.bincount(masks, minlength=1 << n).astype(np.int64)
