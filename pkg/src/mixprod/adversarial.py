"""Statistically confusable model pairs and near-singular models.

A model whose Hadamard extension has a small ``k``-th singular value admits a
second weight vector, far away in parameter space, whose moments are almost
the same.  The constructions here build such pairs and re-measure both
distances instead of trusting the algebra.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import linalg
from .errors import EnumerationLimit, MixprodError, PreconditionFailed
from .hadamard import hadamard_extension
from .model import MixtureModel, ModelClassParams, model_distance, stat_distance, validate_membership
from .moments import exact_moments

MAX_MATERIALIZED_ROWS = 20


class CertificateFailed(MixprodError, ArithmeticError):
    pass


@dataclass(frozen=True, eq=False)
class AdversarialPair:
    base: MixtureModel
    alternate: MixtureModel
    sigma: float
    alpha: np.ndarray
    eps: float
    certified_model_gap: float
    certified_stat_gap: float
    params: ModelClassParams
    sigma_upper_bound: Optional[float] = None

    @property
    def stat_gap_bound(self) -> float:
        return 4 * self.base.k * self.sigma * self.eps

    def to_dict(self) -> dict:
        return {
            "base": self.base.to_dict(),
            "alternate": self.alternate.to_dict(),
            "sigma": self.sigma,
            "alpha": self.alpha.tolist(),
            "eps": self.eps,
            "zeta": self.params.zeta,
            "pi_min": self.params.pi_min,
            "certified_model_gap": self.certified_model_gap,
            "certified_stat_gap": self.certified_stat_gap,
            "stat_gap_bound": self.stat_gap_bound,
            "sigma_upper_bound": self.sigma_upper_bound,
        }


def near_singular_model(k: int, n: int, zeta: float) -> MixtureModel:
    """Uniform weights and ``n`` identical rows ``(0, zeta, 2 zeta, ..., (k-1) zeta)``."""
    if (k - 1) * zeta > 1 + 1e-12 or zeta <= 0:
        raise PreconditionFailed(f"need 0 < zeta and (k-1)*zeta <= 1, got k={k}, zeta={zeta}")
    if n < max(k - 1, 1):
        raise PreconditionFailed(f"need n >= k-1, got n={n}, k={k}")
    row = np.minimum(zeta * np.arange(k), 1.0)
    return MixtureModel(np.full(k, 1.0 / k), np.tile(row, (n, 1)))


def sigma_upper_bound(k: int, n: int, zeta: float) -> float:
    """Bound ``n 2^n (k zeta)^k`` on ``sigma_k(H(m))`` for the arithmetic-progression rows.

    The true ``sigma_k`` scales like ``zeta^(k-1)``, so this ``zeta^k`` bound is
    not valid for every ``(n, zeta)``: ``k=2, n=1, zeta=0.01`` already breaks
    it.  It does hold at the lower-bound parameters ``n = 2k-1``,
    ``zeta = 1/(8k)``, and :func:`lower_bound_instance` re-checks it there.
    """
    return n * 2.0**n * (k * zeta) ** k


def confusable_pair(model: MixtureModel, params: ModelClassParams, eps: float) -> AdversarialPair:
    """Perturb the weights along the weakest right singular direction of ``H(m)``.

    With ``alpha`` the ``k``-th right singular vector, the alternate weights are
    ``pi + 2 sqrt(k) eps (alpha - (1^T alpha) e_1)``: they still sum to one,
    differ from ``pi`` by more than ``eps``, and move the moments by at most
    ``4 k sigma eps``.
    """
    k, n = model.k, model.n
    if n > MAX_MATERIALIZED_ROWS:
        raise EnumerationLimit(f"H(m) with n={n} exceeds the cap of {MAX_MATERIALIZED_ROWS} rows")
    report = validate_membership(model, params)
    if not report:
        raise PreconditionFailed(f"model is outside the class: {report.reason}")
    eps_cap = min(params.pi_min / (4 * math.sqrt(k)), params.zeta)
    if not eps < eps_cap:
        raise PreconditionFailed(f"eps={eps:.6g} violates eps < min(pi_min/(4 sqrt k), zeta) = {eps_cap:.6g}")

    sv = linalg.svd(hadamard_extension(model.m).data, full_matrices=False)
    sigma = float(sv.Sigma[k - 1]) if sv.Sigma.size >= k else 0.0
    if not sigma < 0.5:
        raise PreconditionFailed(f"sigma_k(H(m)) = {sigma:.6g} violates sigma < 1/2")
    alpha = sv.V[:, k - 1].copy()
    if alpha[np.argmax(np.abs(alpha))] < 0:
        alpha = -alpha

    step = alpha.copy()
    step[0] -= alpha.sum()
    pi_hat = model.pi + 2 * math.sqrt(k) * eps * step
    alternate = MixtureModel(pi_hat, model.m)

    model_gap = model_distance(model, alternate)
    stat_gap = stat_distance(exact_moments(model), exact_moments(alternate))
    pair = AdversarialPair(
        base=model,
        alternate=alternate,
        sigma=sigma,
        alpha=alpha,
        eps=eps,
        certified_model_gap=model_gap,
        certified_stat_gap=stat_gap,
        params=params,
    )
    if not model_gap > eps:
        raise CertificateFailed(f"model gap {model_gap:.6g} is not above eps={eps:.6g}")
    if not stat_gap <= pair.stat_gap_bound:
        raise CertificateFailed(f"stat gap {stat_gap:.6g} exceeds 4 k sigma eps = {pair.stat_gap_bound:.6g}")
    if not pi_hat.min() >= params.pi_min / 4:
        raise CertificateFailed(f"alternate weight {pi_hat.min():.6g} is below pi_min/4")
    return pair


def default_eps(k: int) -> float:
    zeta, pi_min = 1.0 / (8 * k), 1.0 / (4 * k)
    return min(pi_min / (4 * math.sqrt(k)), zeta) / 2


def lower_bound_instance(k: int, eps: Optional[float] = None) -> AdversarialPair:
    """Confusable pair on ``2k - 1`` observables with ``zeta = 1/(8k)`` and ``pi_min = 1/(4k)``."""
    if k < 2:
        raise PreconditionFailed("the construction needs k >= 2")
    zeta, pi_min = 1.0 / (8 * k), 1.0 / (4 * k)
    n = 2 * k - 1
    if eps is None:
        eps = default_eps(k)
    bound = sigma_upper_bound(k, n, zeta)
    if not bound < 0.5:
        raise PreconditionFailed(f"sigma bound n 2^n (k zeta)^k = {bound:.6g} is not below 1/2")
    model = near_singular_model(k, n, zeta)
    pair = confusable_pair(model, ModelClassParams(zeta, pi_min), eps)
    if not pair.sigma <= bound:
        raise CertificateFailed(f"measured sigma {pair.sigma:.6g} exceeds its bound {bound:.6g}")
    return AdversarialPair(**{**pair.__dict__, "sigma_upper_bound": bound})


def vandermonde_inverse_norm_bound(nodes) -> float:
    """Lower bound ``max_i prod_{j != i} max(1, |x_j|) / |x_i - x_j|`` on ``||V(x)^{-1}||_inf``."""
    x = np.asarray(nodes, dtype=np.float64)
    diff = np.abs(x[:, None] - x[None, :])
    np.fill_diagonal(diff, 1.0)
    if np.any(diff == 0):
        raise ValueError("Vandermonde nodes must be distinct")
    ratio = np.maximum(1.0, np.abs(x))[None, :] / diff
    np.fill_diagonal(ratio, 1.0)
    return float(np.max(np.prod(ratio, axis=1)))
