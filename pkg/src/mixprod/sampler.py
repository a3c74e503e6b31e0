"""IID sampling from a mixture of binary product distributions.

Randomness is counter-based: samples are grouped in fixed blocks of
``BLOCK_SIZE`` and block ``b`` draws from a Philox stream keyed by the seed
with ``b`` in the top word of the counter.  Sample ``s`` consumes ``n + 1``
uniforms at a fixed offset of its block's stream, so a batch does not depend
on the thread count, and the first ``N`` samples of a larger batch equal a
batch of size ``N``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._parallel import ordered_map
from .model import MixtureModel

BLOCK_SIZE = 1 << 14
SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True, eq=False)
class SampleBatch:
    n: int
    N: int
    data: np.ndarray
    seed: int


def _block(model: MixtureModel, seed: int, block: int, size: int) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(key=seed, counter=block << 192))
    u = rng.random((size, model.n + 1))
    cdf = np.cumsum(model.pi)
    comp = np.minimum(np.searchsorted(cdf, u[:, 0], side="right"), model.k - 1)
    return (u[:, 1:] < model.m.T[comp]).astype(np.uint8)


def draw_samples(model: MixtureModel, N: int, seed: int) -> SampleBatch:
    """Draw ``N`` samples: a component ``j ~ pi``, then independent ``X_i ~ Bernoulli(m[i, j])``."""
    if N < 0:
        raise ValueError("N must be non-negative")
    seed = int(seed) & SEED_MASK
    starts = range(0, N, BLOCK_SIZE)
    blocks = ordered_map(
        lambda start: _block(model, seed, start // BLOCK_SIZE, min(BLOCK_SIZE, N - start)), starts
    )
    data = np.concatenate(blocks) if blocks else np.zeros((0, model.n), dtype=np.uint8)
    return SampleBatch(n=model.n, N=N, data=data, seed=seed)


def write_samples(batch: SampleBatch, path) -> None:
    """Text format: a ``# n=.. N=.. seed=..`` header, then one line of ``n`` space-separated 0/1 tokens per sample."""
    with open(path, "w") as fh:
        fh.write(f"# n={batch.n} N={batch.N} seed={batch.seed}\n")
        for row in batch.data:
            fh.write(" ".join("1" if x else "0" for x in row))
            fh.write("\n")


def read_samples(path) -> np.ndarray:
    n = None
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for tok in line[1:].split():
                    if tok.startswith("n="):
                        n = int(tok[2:])
                continue
            rows.append([int(t) for t in line.split()])
    if rows:
        data = np.asarray(rows, dtype=np.int64)
        if n is not None and data.shape[1] != n:
            raise ValueError(f"header says n={n} but samples have {data.shape[1]} columns")
        if np.any((data != 0) & (data != 1)):
            raise ValueError("samples file contains tokens other than 0/1")
        return data.astype(np.uint8)
    return np.zeros((0, n or 0), dtype=np.uint8)
