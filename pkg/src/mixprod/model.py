"""Mixture models, the separated model class, and the two distances.

A model is a pair ``(pi, m)``: ``pi[j]`` is the weight of component ``j`` and
``m[i, j]`` is the conditional mean of observable ``i`` under component ``j``.
Observables are 0-based throughout the package.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimensionMismatch, EnumerationLimit, InfeasibleParameters, InvalidModel

SIMPLEX_TOL = 1e-12
# Absolute slack when comparing separations and weights against their
# thresholds, so that models built as ``x + j * zeta`` are not rejected over
# one rounding error.
THRESHOLD_SLACK = 1e-12
MAX_ENUMERATION_K = 10


@dataclass(frozen=True, eq=False)
class MixtureModel:
    pi: np.ndarray
    m: np.ndarray

    def __post_init__(self):
        pi = np.array(self.pi, dtype=np.float64).reshape(-1)
        m = np.array(self.m, dtype=np.float64)
        if m.ndim == 1:
            m = m.reshape(1, -1)
        object.__setattr__(self, "pi", pi)
        object.__setattr__(self, "m", m)
        pi.setflags(write=False)
        m.setflags(write=False)
        if pi.size < 1 or m.ndim != 2 or m.shape[0] < 1:
            raise InvalidModel("a model needs k >= 1 components and n >= 1 observables")
        if m.shape[1] != pi.size:
            raise InvalidModel(f"m has {m.shape[1]} columns but pi has {pi.size} entries")
        if not (np.all(np.isfinite(pi)) and np.all(np.isfinite(m))):
            raise InvalidModel("model parameters must be finite")
        if np.any(pi < 0) or abs(pi.sum() - 1.0) > SIMPLEX_TOL:
            raise InvalidModel(f"pi is not a probability vector (sum={pi.sum()!r})")
        if np.any(m < 0) or np.any(m > 1):
            raise InvalidModel("conditional means must lie in [0, 1]")

    @classmethod
    def unchecked(cls, pi, m) -> "MixtureModel":
        """Wrap raw parameters (e.g. an estimate that may leave the simplex) without validation."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "pi", np.array(pi, dtype=np.float64).reshape(-1))
        object.__setattr__(obj, "m", np.atleast_2d(np.array(m, dtype=np.float64)))
        return obj

    @property
    def k(self) -> int:
        return int(self.pi.size)

    @property
    def n(self) -> int:
        return int(self.m.shape[0])

    def permute_columns(self, perm) -> "MixtureModel":
        perm = np.asarray(perm)
        return type(self).unchecked(self.pi[perm], self.m[:, perm])

    def restrict(self, observables) -> "MixtureModel":
        """Model on a subset of observables, rows kept in the given order."""
        return type(self).unchecked(self.pi, self.m[list(observables)])

    def to_dict(self) -> dict:
        return {"k": self.k, "n": self.n, "pi": self.pi.tolist(), "m": self.m.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "MixtureModel":
        model = cls(data["pi"], data["m"])
        if "k" in data and int(data["k"]) != model.k:
            raise InvalidModel(f"declared k={data['k']} but pi has {model.k} entries")
        if "n" in data and int(data["n"]) != model.n:
            raise InvalidModel(f"declared n={data['n']} but m has {model.n} rows")
        return model


@dataclass(frozen=True)
class ModelClassParams:
    zeta: float
    pi_min: float

    def __post_init__(self):
        if not 0 < self.zeta <= 1:
            raise InfeasibleParameters(f"zeta must lie in (0, 1], got {self.zeta}")
        if not 0 < self.pi_min <= 1:
            raise InfeasibleParameters(f"pi_min must lie in (0, 1], got {self.pi_min}")


@dataclass(frozen=True)
class MembershipReport:
    ok: bool
    reason: Optional[str] = None
    # ("pi", j) or ("separation", i, j, j')
    violation: Optional[tuple] = None

    def __bool__(self):
        return self.ok


def validate_membership(model: MixtureModel, params: ModelClassParams) -> MembershipReport:
    """Check ``min pi >= pi_min`` and zeta-separation of every observable.

    Weights are checked first (in component order), then rows in observable
    order; the first failure is reported.
    """
    for j, p in enumerate(model.pi):
        if p < params.pi_min - THRESHOLD_SLACK:
            return MembershipReport(False, f"pi[{j}]={p:.6g} < pi_min={params.pi_min:.6g}", ("pi", j))
    k = model.k
    for i, row in enumerate(model.m):
        for j in range(k):
            for jj in range(j + 1, k):
                gap = abs(row[j] - row[jj])
                if gap < params.zeta - THRESHOLD_SLACK:
                    return MembershipReport(
                        False,
                        f"|m[{i}][{j}] - m[{i}][{jj}]| = {gap:.6g} < zeta={params.zeta:.6g}",
                        ("separation", i, j, jj),
                    )
    return MembershipReport(True)


def model_distance(a: MixtureModel, b: MixtureModel) -> float:
    """L-infinity distance between parameters, minimized over relabelings.

    The minimum over all ``k!`` relabelings is exact: a depth-first search
    over partial permutations that abandons a branch once it cannot beat the
    best complete permutation found so far.
    """
    if a.k != b.k or a.n != b.n:
        raise DimensionMismatch(f"cannot compare (k={a.k}, n={a.n}) with (k={b.k}, n={b.n})")
    k = a.k
    if k > MAX_ENUMERATION_K:
        raise EnumerationLimit(f"enumeration limit: k={k} exceeds {MAX_ENUMERATION_K}")
    # cost[j, l]: error incurred by matching component j of a with component l of b
    cost = np.abs(a.pi[:, None] - b.pi[None, :])
    cost = np.maximum(cost, np.abs(a.m[:, :, None] - b.m[:, None, :]).max(axis=0))
    cost = cost.tolist()

    best = float("inf")
    used = [False] * k

    def search(j, current):
        nonlocal best
        if current >= best:
            return
        if j == k:
            best = current
            return
        row = cost[j]
        for l in sorted(range(k), key=row.__getitem__):
            if not used[l]:
                used[l] = True
                search(j + 1, max(current, row[l]))
                used[l] = False

    search(0, 0.0)
    return float(best)


def _values(mu):
    return np.asarray(getattr(mu, "values", mu), dtype=np.float64)


def stat_distance(mu, mu_prime) -> float:
    """Largest absolute difference between two moment vectors over all subsets."""
    x, y = _values(mu), _values(mu_prime)
    if x.shape != y.shape:
        raise DimensionMismatch(f"moment vectors of length {x.size} and {y.size}")
    return float(np.max(np.abs(x - y)))


def random_model(k: int, n: int, zeta: float, pi_min: float, seed) -> MixtureModel:
    """Draw a model of the separated class, deterministically in ``seed``.

    Every row takes ``k`` sorted uniform points in ``[0, 1 - (k-1) zeta]`` and
    adds ``j * zeta`` to the ``j``-th; one column shuffle is shared by all rows.
    ``pi`` is uniform on the simplex, then mixed with the uniform vector just
    enough to bring its minimum up to ``pi_min``.
    """
    if k < 1 or n < 1:
        raise InfeasibleParameters("k and n must be positive")
    if zeta <= 0 or pi_min <= 0:
        raise InfeasibleParameters("zeta and pi_min must be positive")
    width = 1.0 - (k - 1) * zeta
    if width < -THRESHOLD_SLACK:
        raise InfeasibleParameters(f"(k-1)*zeta = {(k - 1) * zeta:.6g} exceeds 1")
    if k * pi_min > 1.0 + THRESHOLD_SLACK:
        raise InfeasibleParameters(f"k*pi_min = {k * pi_min:.6g} exceeds 1")
    width = max(width, 0.0)

    rng = np.random.default_rng(seed)
    points = np.sort(rng.uniform(0.0, 1.0, size=(n, k)) * width, axis=1)
    m = np.clip(points + zeta * np.arange(k), 0.0, 1.0)
    m = m[:, rng.permutation(k)]

    pi = rng.dirichlet(np.ones(k))
    lo = pi.min()
    if lo < pi_min:
        t = (pi_min - lo) / (1.0 / k - lo)
        pi = (1.0 - t) * pi + t / k if t < 1.0 else np.full(k, 1.0 / k)
    pi = pi / pi.sum()
    return MixtureModel(pi, m)


def save_model(model: MixtureModel, path) -> None:
    with open(path, "w") as fh:
        json.dump(model.to_dict(), fh)
        fh.write("\n")


def load_model(path, check: bool = True) -> MixtureModel:
    """Read a model file; ``check=False`` also accepts raw estimates (any JSON with ``pi`` and ``m``)."""
    with open(path) as fh:
        data = json.load(fh)
    if check:
        return MixtureModel.from_dict(data)
    return MixtureModel.unchecked(data["pi"], data["m"])
