# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_pykernels``."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def hadamard_extension(rows):
    cdef const double[:, ::1] src = np.ascontiguousarray(rows, dtype=np.float64)
    cdef Py_ssize_t r = src.shape[0], k = src.shape[1]
    out_arr = np.empty((1 << r, k), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t mask, rest, j, low
    with nogil:
        for j in range(k):
            out[0, j] = 1.0
        for mask in range(1, 1 << r):
            rest = mask & (mask - 1)
            low = 0
            while not (mask >> low) & 1:
                low += 1
            for j in range(k):
                out[mask, j] = src[low, j] * out[rest, j]
    return out_arr


def superset_sums(counts, int n):
    cdef cnp.int64_t[::1] c = counts
    cdef Py_ssize_t size = 1 << n, half, base, j
    with nogil:
        half = 1
        while half < size:
            base = 0
            while base < size:
                for j in range(base, base + half):
                    c[j] += c[j + half]
                base += 2 * half
            half *= 2
    return counts


def support_histogram(data):
    cdef const cnp.uint8_t[:, ::1] x = np.ascontiguousarray(data, dtype=np.uint8)
    cdef Py_ssize_t n_samples = x.shape[0], n = x.shape[1], s, i
    cdef cnp.int64_t mask
    counts_arr = np.zeros(1 << n, dtype=np.int64)
    cdef cnp.int64_t[::1] counts = counts_arr
    with nogil:
        for s in range(n_samples):
            mask = 0
            # branchless: data bits are unpredictable
            for i in range(n):
                mask |= (<cnp.int64_t>(x[s, i] != 0)) << i
            counts[mask] += 1
    return counts_arr
