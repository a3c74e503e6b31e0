"""Dense kernels with explicit accuracy reporting: SVD, real eigendecomposition, solves.

LAPACK (through numpy) does the factorizations; this module adds the checks
and residual reports the identification algorithm relies on.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ComplexSpectrum, NearSingular, NonFiniteInput

SVD_BACKWARD_RTOL = 1e-10
SOLVE_RESIDUAL_RTOL = 1e-10
SINGULAR_RTOL = 1e-13
IMAG_RTOL = 1e-6


@dataclass(frozen=True, eq=False)
class SvdResult:
    U: np.ndarray
    Sigma: np.ndarray
    V: np.ndarray
    backward_error: float

    def truncate(self, r: int) -> np.ndarray:
        """Best rank-``r`` approximation ``U_r diag(Sigma_r) V_r^T``."""
        return (self.U[:, :r] * self.Sigma[:r]) @ self.V[:, :r].T


@dataclass(frozen=True, eq=False)
class EigResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    max_imag_residual: float
    max_defect: float


def _finite(A, name="matrix"):
    A = np.asarray(A, dtype=np.float64)
    if not np.all(np.isfinite(A)):
        raise NonFiniteInput(f"{name} has non-finite entries")
    return A


def svd(A, full_matrices: bool = True) -> SvdResult:
    """SVD ``A = U diag(Sigma) V^T`` with a measured backward error.

    ``backward_error`` is the Frobenius norm of the reconstruction residual,
    which bounds its spectral norm.  With ``full_matrices=False`` the factors
    are thin (``min(m, n)`` columns), which tall matrices need.
    """
    A = np.atleast_2d(_finite(A))
    U, s, Vt = np.linalg.svd(A, full_matrices=full_matrices)
    p = s.size
    resid = A - (U[:, :p] * s) @ Vt[:p, :]
    err = float(np.linalg.norm(resid))
    return SvdResult(U=U, Sigma=s, V=Vt.T, backward_error=err)


def singular_values(A) -> np.ndarray:
    return np.linalg.svd(np.atleast_2d(_finite(A)), compute_uv=False)


def sigma_k(A, k: int) -> float:
    """The ``k``-th largest singular value (1-based)."""
    s = singular_values(A)
    if not 1 <= k <= s.size:
        raise ValueError(f"k={k} out of range for a matrix with {s.size} singular values")
    return float(s[k - 1])


def eig_real(A, imag_tol: float | None = None) -> EigResult:
    """Eigendecomposition of a matrix expected to have a real spectrum.

    Eigenvalues come back sorted from largest to smallest, eigenvectors as
    unit columns whose largest-magnitude entry is positive.  If any
    eigenvalue has ``|imag| > imag_tol`` (default ``1e-6 * ||A||``) a
    :class:`ComplexSpectrum` is raised instead of dropping the imaginary part.
    """
    A = _finite(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"eig_real needs a square matrix, got shape {A.shape}")
    if imag_tol is None:
        imag_tol = IMAG_RTOL * np.linalg.norm(A, 2)
    w, vecs = np.linalg.eig(A)
    imag = float(np.max(np.abs(w.imag))) if w.size else 0.0
    if imag > imag_tol:
        raise ComplexSpectrum(
            f"eigenvalue with imaginary part {imag:.3g} exceeds tolerance {imag_tol:.3g}"
        )
    order = np.argsort(-w.real, kind="stable")
    vals = w.real[order]
    vecs = np.real(vecs[:, order])
    norms = np.linalg.norm(vecs, axis=0)
    norms[norms == 0] = 1.0
    vecs = vecs / norms
    pivots = vecs[np.argmax(np.abs(vecs), axis=0), np.arange(vecs.shape[1])]
    vecs = vecs * np.where(pivots < 0, -1.0, 1.0)
    defect = np.linalg.norm(A @ vecs - vecs * vals, axis=0)
    return EigResult(
        eigenvalues=vals,
        eigenvectors=vecs,
        max_imag_residual=imag,
        max_defect=float(defect.max()) if defect.size else 0.0,
    )


def solve(A, b) -> np.ndarray:
    """Solve ``A x = b`` for square, numerically nonsingular ``A``.

    ``b`` may be a vector or a matrix of right-hand sides.  Raises
    :class:`NearSingular` when ``sigma_min / sigma_max <= 1e-13``.
    """
    A = _finite(A)
    b = _finite(b, "right-hand side")
    s = singular_values(A)
    ratio = float(s[-1] / s[0]) if s[0] > 0 else 0.0
    if ratio <= SINGULAR_RTOL:
        raise NearSingular(f"matrix is numerically singular (sigma_min/sigma_max = {ratio:.3g})", ratio)
    x = np.linalg.solve(A, b)
    resid = np.linalg.norm(A @ x - b)
    bound = SOLVE_RESIDUAL_RTOL * (s[0] * np.linalg.norm(x) + np.linalg.norm(b))
    if resid > bound:
        raise NearSingular(f"solve residual {resid:.3g} exceeds {bound:.3g}", ratio)
    return x
