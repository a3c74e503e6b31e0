"""Compare the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Each row reports the best-of-``repeat`` wall time of both backends on the
same input and checks that their outputs are identical.
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from mixprod import _pykernels

try:
    from mixprod import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def cases(rng):
    for r, k in [(10, 4), (16, 6), (20, 8)]:
        rows = rng.uniform(size=(r, k))
        yield f"hadamard_extension r={r} k={k}", "hadamard_extension", (rows,), None
    for N, n in [(100_000, 8), (1_000_000, 12), (200_000, 20)]:
        data = (rng.uniform(size=(N, n)) < 0.5).astype(np.uint8)
        yield f"support_histogram N={N} n={n}", "support_histogram", (data,), None
    for n in (12, 16, 20):
        counts = rng.integers(0, 1000, 1 << n).astype(np.int64)
        yield f"superset_sums n={n}", "superset_sums", (counts, n), 0


def best_time(fn, args, inplace, repeat):
    def call():
        fresh = list(args)
        if inplace is not None:
            fresh[inplace] = args[inplace].copy()
        return fn(*fresh)

    return min(timeit.repeat(call, number=1, repeat=repeat))


def run_case(name, fn_name, args, inplace, repeat):
    py = getattr(_pykernels, fn_name)
    t_py = best_time(py, args, inplace, repeat)
    if _ckernels is None:
        return f"{name:36s} python {t_py * 1e3:9.2f} ms   cython      n/a"
    cy = getattr(_ckernels, fn_name)
    t_cy = best_time(cy, args, inplace, repeat)
    if inplace is None:
        same = np.array_equal(py(*args), cy(*args))
    else:
        a, b = args[inplace].copy(), args[inplace].copy()
        py(a, *args[1:])
        cy(b, *args[1:])
        same = np.array_equal(a, b)
    return (
        f"{name:36s} python {t_py * 1e3:9.2f} ms   cython {t_cy * 1e3:9.2f} ms   "
        f"speedup {t_py / t_cy:6.2f}x   identical={same}"
    )


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    rng = np.random.default_rng(args.seed)
    for case in cases(rng):
        print(run_case(*case, args.repeat), flush=True)


if __name__ == "__main__":
    main()
