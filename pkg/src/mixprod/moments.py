"""Multilinear moments: exact, empirical, and the pair matrices built from them."""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .errors import DimensionMismatch, EnumerationLimit, MixprodError
from .hadamard import hadamard_extension
from .model import MixtureModel

MAX_OBSERVABLES = 24


@dataclass(frozen=True, eq=False)
class MomentVector:
    """``values[mask]`` is the moment ``E[prod_{i in mask} X_i]``; ``values[0] == 1``."""

    n: int
    values: np.ndarray
    provenance: str = "exact"
    sample_count: Optional[int] = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (1 << self.n,):
            raise DimensionMismatch(f"moment vector for n={self.n} needs {1 << self.n} values, got {values.size}")
        object.__setattr__(self, "values", values)

    def __getitem__(self, subset) -> float:
        return float(self.values[subset_mask(subset)])

    def to_dict(self) -> dict:
        return {"n": self.n, "values": self.values.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "MomentVector":
        values = np.asarray(data["values"], dtype=np.float64)
        n = int(data["n"])
        return cls(n=n, values=values, provenance=data.get("provenance", "exact"))


@dataclass(frozen=True)
class SubsetPartition:
    """Two disjoint observable blocks ``S`` and ``T`` plus an anchor observable."""

    S: tuple
    T: tuple
    anchor: int

    def __post_init__(self):
        S = tuple(sorted(int(i) for i in self.S))
        T = tuple(sorted(int(i) for i in self.T))
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "anchor", int(self.anchor))
        everything = S + T + (self.anchor,)
        if len(set(everything)) != len(everything):
            raise ValueError(f"partition blocks overlap: S={S}, T={T}, anchor={self.anchor}")
        if any(i < 0 for i in everything):
            raise ValueError("observable indices must be non-negative")

    @property
    def observables(self) -> tuple:
        return tuple(sorted(self.S + self.T + (self.anchor,)))

    def to_dict(self) -> dict:
        return {"S": list(self.S), "T": list(self.T), "anchor": self.anchor}

    @classmethod
    def parse(cls, text: str) -> "SubsetPartition":
        """Parse ``"S;T;anchor"`` with comma-separated 0-based indices, e.g. ``"1,2;3,4;0"``."""
        parts = text.split(";")
        if len(parts) != 3:
            raise ValueError(f"subset string {text!r} must look like 'S;T;anchor'")

        def ints(chunk):
            chunk = chunk.strip()
            return [int(x) for x in chunk.split(",")] if chunk else []

        S, T, anchor = ints(parts[0]), ints(parts[1]), ints(parts[2])
        if len(anchor) != 1:
            raise ValueError(f"subset string {text!r} needs exactly one anchor")
        return cls(tuple(S), tuple(T), anchor[0])


@dataclass(frozen=True, eq=False)
class PairMatrices:
    C: np.ndarray
    C1: np.ndarray


def subset_mask(subset) -> int:
    mask = 0
    for i in subset:
        mask |= 1 << int(i)
    return mask


def local_to_global(indices: Sequence[int]) -> np.ndarray:
    """Global bitmask of every subset of ``indices``, listed by local bitmask over the sorted indices."""
    out = np.zeros(1, dtype=np.int64)
    for i in sorted(indices):
        out = np.concatenate([out, out | (1 << int(i))])
    return out


def exact_moments(model: MixtureModel) -> MomentVector:
    if model.n > MAX_OBSERVABLES:
        raise EnumerationLimit(f"n={model.n} exceeds the dense moment cap of {MAX_OBSERVABLES}")
    H = hadamard_extension(model.m).data
    values = H @ model.pi
    values[0] = 1.0
    return MomentVector(n=model.n, values=values, provenance="exact")


def empirical_moments(samples) -> MomentVector:
    """Sample averages of every product ``X_S`` in one pass over the data.

    Samples are first histogrammed by their support; a superset-sum transform
    then turns support counts into counts of samples containing each subset.
    """
    data = np.asarray(samples)
    if data.ndim != 2:
        raise ValueError("samples must be an N x n array")
    N, n = data.shape
    if N < 1:
        raise ValueError("at least one sample is needed")
    if n > MAX_OBSERVABLES:
        raise EnumerationLimit(f"n={n} exceeds the dense moment cap of {MAX_OBSERVABLES}")
    if not np.all((data == 0) | (data == 1)):
        raise MixprodError("samples must be binary (0/1)")
    counts = kernels.support_histogram(data.astype(np.uint8))
    kernels.superset_sums(counts, n)
    values = counts / N
    values[0] = 1.0
    return MomentVector(n=n, values=values, provenance="empirical", sample_count=N)


def assemble_pair_matrices(mu: MomentVector, p: SubsetPartition) -> PairMatrices:
    """``C[a, b] = mu(A | B)`` and ``C1[a, b] = mu(A | B | {anchor})`` for local masks ``a`` of ``S`` and ``b`` of ``T``."""
    top = max(p.S + p.T + (p.anchor,))
    if top >= mu.n:
        raise IndexError(f"observable {top} out of range for n={mu.n}")
    rows = local_to_global(p.S)
    cols = local_to_global(p.T)
    idx = rows[:, None] | cols[None, :]
    return PairMatrices(C=mu.values[idx], C1=mu.values[idx | (1 << p.anchor)])


def restrict_moments(mu: MomentVector, observables) -> MomentVector:
    """Moments of the sub-collection ``observables``, re-indexed by local bitmask over its sorted members."""
    observables = sorted(set(int(i) for i in observables))
    if observables and observables[-1] >= mu.n:
        raise IndexError(f"observable {observables[-1]} out of range for n={mu.n}")
    values = mu.values[local_to_global(observables)]
    return MomentVector(n=len(observables), values=values, provenance=mu.provenance, sample_count=mu.sample_count)


def save_moments(mu: MomentVector, path) -> None:
    with open(path, "w") as fh:
        json.dump(mu.to_dict(), fh)
        fh.write("\n")


def load_moments(path) -> MomentVector:
    with open(path) as fh:
        return MomentVector.from_dict(json.load(fh))
