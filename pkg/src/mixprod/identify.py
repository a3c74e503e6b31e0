"""Identification of ``(pi, m)`` from (noisy) multilinear moments.

The moments restricted to two disjoint blocks ``S``, ``T`` and an anchor
observable form a ``2^|S| x 2^|T| x 2`` tensor whose factors are
``H(m[S])``, ``H(m[T])`` and ``(pi, pi * m_anchor)``.  After projecting onto
the top ``k`` singular subspaces of the anchor-free slice, the factor
``U^T H(m[S])`` is recovered as the eigenvectors of ``C1_hat C_hat^{-1}``,
whose eigenvalues are the anchor's conditional means.  ``pi`` and the
remaining rows of ``m`` then follow from linear solves.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

import numpy as np

from . import linalg
from ._parallel import ordered_map
from .errors import (
    DegeneratePi,
    DimensionMismatch,
    EigenvalueCollision,
    EnumerationLimit,
    MixprodError,
    NoViableCandidate,
    NormalizationUnstable,
    RankDeficient,
)
from .hadamard import hadamard_extension
from .model import MixtureModel
from .moments import MomentVector, SubsetPartition, assemble_pair_matrices, local_to_global, restrict_moments


@dataclass
class IdentifyOptions:
    rank_rtol: float = 1e-10  # RankDeficient if sigma_k(C) <= rank_rtol * sigma_1(C)
    imag_rtol: float = 1e-6  # ComplexSpectrum if |Im lambda| > imag_rtol * ||C1_hat C_hat^-1||
    sep_rtol: float = 1e-7  # EigenvalueCollision if a gap <= sep_rtol * max|lambda|
    pi_tol: float = 1e-10
    row0_tol: float = 1e-10
    project_simplex: bool = False
    min_subset_size: Optional[int] = None  # search only; default ceil(lg k)
    max_candidates: int = 10**6


@dataclass(frozen=True, eq=False)
class Diagnostics:
    sigma_k_Ctilde: float
    sigma_1_Ctilde: float
    eig_imag_residual: float
    eig_defect: float
    fit_residual: float
    column_scales: np.ndarray
    column_scales_T: np.ndarray
    anchor_eigenvalues: np.ndarray
    subset_size: int
    # "certified" when |S| = |T| = k - 1, the setting the accuracy guarantee covers
    guarantee: str

    def to_dict(self) -> dict:
        return {
            "sigma_k_Ctilde": self.sigma_k_Ctilde,
            "sigma_1_Ctilde": self.sigma_1_Ctilde,
            "eig_imag_residual": self.eig_imag_residual,
            "eig_defect": self.eig_defect,
            "fit_residual": self.fit_residual,
            "column_scales": self.column_scales.tolist(),
            "column_scales_T": self.column_scales_T.tolist(),
            "anchor_eigenvalues": self.anchor_eigenvalues.tolist(),
            "subset_size": self.subset_size,
            "guarantee": self.guarantee,
        }


@dataclass(frozen=True, eq=False)
class IdentificationResult:
    pi_tilde: np.ndarray
    m_tilde: np.ndarray  # rows follow ``observables``
    partition: SubsetPartition
    observables: tuple
    diagnostics: Diagnostics
    U_hat: np.ndarray = field(repr=False)
    V_hat: np.ndarray = field(repr=False)
    S_hat: np.ndarray = field(repr=False)
    T_hat: np.ndarray = field(repr=False)
    pi_raw: np.ndarray = field(repr=False)

    @property
    def k(self) -> int:
        return int(self.pi_tilde.size)

    def model(self) -> MixtureModel:
        return MixtureModel.unchecked(self.pi_tilde, self.m_tilde)

    def to_dict(self, m_full: Optional[np.ndarray] = None) -> dict:
        diag = self.diagnostics.to_dict()
        diag["observables"] = list(self.observables)
        m = self.m_tilde if m_full is None else m_full
        return {
            "pi": self.pi_tilde.tolist(),
            "m": np.asarray(m).tolist(),
            "partition": self.partition.to_dict(),
            "diagnostics": diag,
        }


def _check_collision(vals: np.ndarray, sep_rtol: float) -> None:
    if vals.size < 2:
        return
    gaps = -np.diff(vals)
    tol = sep_rtol * float(np.max(np.abs(vals)))
    j = int(np.argmin(gaps))
    if gaps[j] <= tol:
        raise EigenvalueCollision(
            f"eigenvalues {vals[j]:.6g} and {vals[j + 1]:.6g} of the anchor pencil collide "
            f"(gap {gaps[j]:.3g} <= {tol:.3g}); the anchor observable is not separated enough to pair components"
        )


def _normalize(lift: np.ndarray, vecs: np.ndarray, row0_tol: float):
    """Scale eigenvector columns so that the lifted matrix has an all-ones empty-set row."""
    row0 = lift[0] @ vecs
    if np.any(np.abs(row0) < row0_tol):
        raise NormalizationUnstable(
            f"empty-set row of the lifted eigenvectors is {np.min(np.abs(row0)):.3g}, below {row0_tol:.3g}"
        )
    return vecs / row0, row0


def identify(
    mu_hat: MomentVector,
    partition: SubsetPartition,
    k: Optional[int] = None,
    opts: Optional[IdentifyOptions] = None,
) -> IdentificationResult:
    """Run the pencil-based decomposition on one partition.

    ``k`` defaults to ``|S| + 1``.  Smaller blocks are allowed as long as
    ``2^|S|`` and ``2^|T|`` are at least ``k``; the result is then tagged
    ``guarantee="heuristic"``.
    """
    opts = opts or IdentifyOptions()
    S, T, anchor = partition.S, partition.T, partition.anchor
    if k is None:
        k = len(S) + 1
    if k < 1:
        raise ValueError("k must be positive")
    if (1 << len(S)) < k or (1 << len(T)) < k:
        raise DimensionMismatch(f"blocks of sizes {len(S)}, {len(T)} cannot carry k={k} components")

    pm = assemble_pair_matrices(mu_hat, partition)
    C, C1 = pm.C, pm.C1

    sv = linalg.svd(C)
    s1, sk = float(sv.Sigma[0]), float(sv.Sigma[k - 1])
    if not sk > opts.rank_rtol * s1:
        raise RankDeficient(
            f"sigma_{k}(C_ST) = {sk:.3g} is below {opts.rank_rtol:.0e} * sigma_1 = {opts.rank_rtol * s1:.3g}; "
            "the blocks do not determine k components"
        )
    U = sv.U[:, :k]
    V = sv.V[:, :k]
    Ch = U.T @ C @ V
    Ch1 = U.T @ C1 @ V

    pencil_S = linalg.solve(Ch.T, Ch1.T).T  # C1_hat C_hat^{-1}
    pencil_T = linalg.solve(Ch, Ch1).T  # C1_hat^T (C_hat^T)^{-1}
    eig_S = linalg.eig_real(pencil_S, opts.imag_rtol * np.linalg.norm(pencil_S, 2))
    eig_T = linalg.eig_real(pencil_T, opts.imag_rtol * np.linalg.norm(pencil_T, 2))
    _check_collision(eig_S.eigenvalues, opts.sep_rtol)
    _check_collision(eig_T.eigenvalues, opts.sep_rtol)

    S_hat, scales_S = _normalize(U, eig_S.eigenvectors, opts.row0_tol)
    T_hat, scales_T = _normalize(V, eig_T.eigenvectors, opts.row0_tol)

    # C[:, 0] = mu(R) for R in S; C[:, {i}] = mu(R + i) for i in T; C1[:, 0] = mu(R + anchor)
    pi_raw = linalg.solve(S_hat, U.T @ C[:, 0])
    if np.min(np.abs(pi_raw)) <= opts.pi_tol:
        raise DegeneratePi(f"recovered weight {np.min(np.abs(pi_raw)):.3g} is too small to divide by")

    rhs_S = np.column_stack([C[:, 1 << t] for t in range(len(T))] + [C1[:, 0]])
    rows_via_S = (linalg.solve(S_hat, U.T @ rhs_S) / pi_raw[:, None]).T
    rows = {i: rows_via_S[t] for t, i in enumerate(T)}
    rows[anchor] = rows_via_S[-1]
    if S:
        rhs_T = np.column_stack([C[1 << s, :] for s in range(len(S))])
        rows_via_T = (linalg.solve(T_hat, V.T @ rhs_T) / pi_raw[:, None]).T
        rows.update({i: rows_via_T[s] for s, i in enumerate(S)})

    observables = partition.observables
    m_tilde = np.array([rows[i] for i in observables]).reshape(len(observables), k)
    pi_tilde = pi_raw.copy()
    if opts.project_simplex:
        pi_tilde = np.clip(pi_tilde, 0.0, None)
        pi_tilde /= pi_tilde.sum()

    fitted = hadamard_extension(m_tilde).data @ pi_tilde
    fit = float(np.max(np.abs(fitted - restrict_moments(mu_hat, observables).values)))

    full = len(S) == k - 1 and len(T) == k - 1
    diagnostics = Diagnostics(
        sigma_k_Ctilde=sk,
        sigma_1_Ctilde=s1,
        eig_imag_residual=max(eig_S.max_imag_residual, eig_T.max_imag_residual),
        eig_defect=max(eig_S.max_defect, eig_T.max_defect),
        fit_residual=fit,
        column_scales=scales_S,
        column_scales_T=scales_T,
        anchor_eigenvalues=eig_S.eigenvalues,
        subset_size=len(S),
        guarantee="certified" if full else "heuristic",
    )
    return IdentificationResult(
        pi_tilde=pi_tilde,
        m_tilde=m_tilde,
        partition=partition,
        observables=observables,
        diagnostics=diagnostics,
        U_hat=U,
        V_hat=V,
        S_hat=S_hat,
        T_hat=T_hat,
        pi_raw=pi_raw,
    )


def default_partition(k: int, n: Optional[int] = None) -> SubsetPartition:
    """Anchor 0, ``S = 1..k-1``, ``T = k..2k-2``."""
    if n is not None and n < 2 * k - 1:
        raise DimensionMismatch(f"n={n} observables are fewer than 2k-1={2 * k - 1}")
    return SubsetPartition(tuple(range(1, k)), tuple(range(k, 2 * k - 1)), 0)


def candidate_partitions(n: int, k: int, min_size: Optional[int] = None):
    """Partitions with ``|S| = |T| = s`` for ``s`` from ``min_size`` to ``k-1``, in ``(s, S, T, anchor)`` order.

    A partition and its mirror image (``S`` and ``T`` swapped) give the same
    decomposition, so only the one with ``min(S) < min(T)`` is listed.
    """
    if min_size is None:
        min_size = math.ceil(math.log2(k)) if k > 1 else 0
    out = []
    for s in range(min_size, k):
        if 2 * s + 1 > n:
            break
        for S in combinations(range(n), s):
            rest = [i for i in range(n) if i not in S]
            for T in combinations(rest, s):
                if s and T[0] < S[0]:
                    continue
                for anchor in rest:
                    if anchor not in T:
                        out.append((s, S, T, anchor))
    out.sort()
    return out


def count_candidates(n: int, k: int, min_size: Optional[int] = None) -> int:
    if min_size is None:
        min_size = math.ceil(math.log2(k)) if k > 1 else 0
    total = 0
    for s in range(min_size, k):
        if 2 * s + 1 > n:
            break
        pairs = math.comb(n, s) * math.comb(n - s, s)
        total += (pairs // 2 if s else pairs) * (n - 2 * s)
    return total


def identify_search(mu_hat: MomentVector, k: int, opts: Optional[IdentifyOptions] = None) -> IdentificationResult:
    """Try every candidate partition and keep the one whose fitted moments are closest to ``mu_hat``.

    Candidates that raise are skipped; ties in the fit residual go to the
    lexicographically smallest ``(s, S, T, anchor)``.
    """
    opts = opts or IdentifyOptions()
    n = mu_hat.n
    if n < 2 * k - 1:
        raise DimensionMismatch(f"n={n} observables are fewer than 2k-1={2 * k - 1}")
    total = count_candidates(n, k, opts.min_subset_size)
    if total > opts.max_candidates:
        raise EnumerationLimit(f"{total} candidate partitions exceed max_candidates={opts.max_candidates}")
    candidates = candidate_partitions(n, k, opts.min_subset_size)

    def attempt(cand):
        s, S, T, anchor = cand
        try:
            return identify(mu_hat, SubsetPartition(S, T, anchor), k, opts)
        except (MixprodError, np.linalg.LinAlgError):
            return None

    results = ordered_map(attempt, candidates)
    best = None
    for cand, res in zip(candidates, results):
        if res is None or not np.isfinite(res.diagnostics.fit_residual):
            continue
        key = (res.diagnostics.fit_residual, cand)
        if best is None or key < best[0]:
            best = (key, res)
    if best is None:
        raise NoViableCandidate(f"all {len(candidates)} candidate partitions failed")
    return best[1]


def row_from_T(result: IdentificationResult, mu_hat: MomentVector, i: int) -> np.ndarray:
    """Conditional means of observable ``i`` (outside ``T``) from the ``T``-side factor."""
    T = result.partition.T
    if i in T:
        raise ValueError(f"observable {i} belongs to T; its row comes from the S-side factor")
    idx = local_to_global(T) | (1 << i)
    rhs = result.V_hat.T @ mu_hat.values[idx]
    return linalg.solve(result.T_hat, rhs) / result.pi_raw


def extend_to_all_observables(
    result: IdentificationResult, mu_hat: MomentVector, opts: Optional[IdentifyOptions] = None
) -> np.ndarray:
    """Full ``n x k`` matrix of conditional means.

    Rows of observables used by ``result`` are kept; every other row is
    solved from the ``T``-side factor, one ``k x k`` system per observable.
    """
    opts = opts or IdentifyOptions()
    if np.min(np.abs(result.pi_raw)) <= opts.pi_tol:
        raise DegeneratePi(f"recovered weight {np.min(np.abs(result.pi_raw)):.3g} is too small to divide by")
    n, k = mu_hat.n, result.k
    out = np.empty((n, k))
    used = {i: r for i, r in zip(result.observables, result.m_tilde)}
    for i in range(n):
        out[i] = used[i] if i in used else row_from_T(result, mu_hat, i)
    return out
