"""Self-contained dense linear algebra kernels.

Matrices are plain row-major ``float64`` numpy arrays with value semantics:
every operation copies its input and returns fresh arrays.  The
decompositions are one-sided Jacobi (SVD, after a Householder QR reduction
for tall inputs) and cyclic Jacobi (symmetric eigenproblem).  Jacobi is used
throughout because it delivers high relative accuracy for the smallest
singular values, which is exactly what the downstream condition-number and
inverse-moment experiments measure.  No LAPACK is used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels

_JACOBI_TOL = 1e-15
_SYM_TOL = 1e-14
_MAX_SWEEPS = 60


@dataclass(frozen=True)
class SpectralSummary:
    """Extreme singular values and the condition number of one matrix."""

    s_max: float
    s_min: float
    kappa: float
    spectrum: np.ndarray  # all min(n, p) singular values, descending

    def __post_init__(self) -> None:
        if self.spectrum.size and (
            self.s_max != self.spectrum[0] or self.s_min != self.spectrum[-1]
        ):
            raise ValueError("summary fields inconsistent with spectrum")


def _as_matrix(a, name: str = "matrix") -> np.ndarray:
    arr = np.ascontiguousarray(a, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError(f"{name} must be a non-empty 2-D array")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def default_rank_tol(shape: tuple[int, int], s_max: float) -> float:
    """Conventional numerical-rank cutoff: max(n, p) * eps * s_max."""
    return max(shape) * np.finfo(np.float64).eps * s_max


def _jacobi_svd_square(m: np.ndarray, want_uv: bool):
    # m is square-or-wide-free: rows of W are the columns of m
    w = np.ascontiguousarray(m.T)
    p = w.shape[0]
    vw = np.eye(p) if want_uv else np.empty((0, 0))
    _kernels.onesided_jacobi(w, vw, want_uv, _JACOBI_TOL, _MAX_SWEEPS)
    norms = np.sqrt(np.einsum("ij,ij->i", w, w))
    order = np.argsort(-norms, kind="stable")
    s = norms[order]
    if not want_uv:
        return None, s, None
    u = np.zeros((m.shape[0], p))
    for k, idx in enumerate(order):
        if s[k] > 0.0:
            u[:, k] = w[idx] / s[k]
    _complete_orthonormal(u, s)
    v = np.ascontiguousarray(vw[order, :].T)
    return u, s, v


def _complete_orthonormal(u: np.ndarray, s: np.ndarray) -> None:
    # Fill columns belonging to zero singular values with an orthonormal
    # completion (deterministic: candidates are standard basis vectors,
    # re-orthogonalized twice).
    zero_cols = [k for k in range(s.shape[0]) if s[k] == 0.0]
    if not zero_cols:
        return
    n = u.shape[0]
    cand = 0
    for k in zero_cols:
        while cand < n:
            v = np.zeros(n)
            v[cand] = 1.0
            cand += 1
            for _ in range(2):
                v -= u @ (u.T @ v)
            nv = math.sqrt(float(v @ v))
            if nv > 0.5:
                u[:, k] = v / nv
                break
        else:
            raise ValueError("orthonormal completion failed")


def svd(a) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin singular value decomposition A = U diag(s) V^T.

    U has orthonormal columns (n x k), s is non-increasing and non-negative
    (k = min(n, p)), V has orthonormal columns (p x k).
    """
    m = _as_matrix(a)
    n, p = m.shape
    if n < p:
        u, s, v = svd(m.T)
        return v, s, u
    if n > p:
        r, vs, vnorm2 = _kernels.householder_qr(m)
        u_r, s, v = _jacobi_svd_square(r, True)
        u = _kernels.apply_q(vs, vnorm2, np.ascontiguousarray(u_r))
        return u, s, v
    u, s, v = _jacobi_svd_square(m, True)
    return u, s, v


def singular_values(a) -> np.ndarray:
    """Singular values only (descending); skips accumulating U and V."""
    m = _as_matrix(a)
    n, p = m.shape
    if n < p:
        m = np.ascontiguousarray(m.T)
        n, p = p, n
    if n > p:
        m, _, _ = _kernels.householder_qr(m)
    _, s, _ = _jacobi_svd_square(m, False)
    return s


def spectral_summary(a) -> SpectralSummary:
    """s_max, s_min (the min(n,p)-th singular value) and kappa = s_max/s_min,
    with kappa = +inf when s_min is exactly zero."""
    s = singular_values(a)
    s_max = float(s[0])
    s_min = float(s[-1])
    kappa = s_max / s_min if s_min > 0.0 else math.inf
    return SpectralSummary(s_max=s_max, s_min=s_min, kappa=kappa, spectrum=s)


def spectral_norm(a) -> float:
    """Largest singular value."""
    return float(singular_values(a)[0])


def _check_symmetric(s) -> np.ndarray:
    m = _as_matrix(s, "symmetric matrix")
    if m.shape[0] != m.shape[1]:
        raise ValueError("symmetric eigendecomposition requires a square matrix")
    scale = float(np.max(np.abs(m)))
    if scale > 0.0 and float(np.max(np.abs(m - m.T))) > 1e-12 * scale:
        raise ValueError("matrix is not symmetric to 1e-12 relative")
    return m


def sym_eig(s) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix: S = V diag(lam) V^T.

    Eigenvalues are returned in descending order with orthonormal
    eigenvectors in the matching columns of V.  Inputs must be symmetric to
    1e-12 relative (in max-abs norm); asymmetric input is rejected.
    """
    m = _check_symmetric(s)
    w = m.copy()
    v = np.eye(m.shape[0])
    _kernels.sym_jacobi(w, v, True, _SYM_TOL, _MAX_SWEEPS)
    lam = np.diag(w).copy()
    order = np.argsort(-lam, kind="stable")
    return lam[order], np.ascontiguousarray(v[:, order])


def sym_eigvalues(s) -> np.ndarray:
    """Eigenvalues only (descending) of a symmetric matrix."""
    m = _check_symmetric(s)
    w = m.copy()
    _kernels.sym_jacobi(w, np.empty((0, 0)), False, _SYM_TOL, _MAX_SWEEPS)
    lam = np.diag(w).copy()
    lam[::-1].sort()
    return lam


def sqrt_psd(s) -> np.ndarray:
    """Symmetric PSD square root R with R @ R = S.

    Eigenvalues down to -1e-10 * lam_max are treated as rounding noise and
    clamped to zero; anything below that is rejected as non-PSD.
    """
    lam, v = sym_eig(s)
    lam_max = float(lam[0]) if lam.size else 0.0
    if lam_max < 0.0 or (lam.size and float(lam[-1]) < -1e-10 * max(lam_max, 0.0)):
        raise ValueError("matrix is not positive semi-definite")
    lam = np.clip(lam, 0.0, None)
    root = (v * np.sqrt(lam)) @ v.T
    return (root + root.T) / 2.0


def pinv(a, rank_tol: float | None = None) -> np.ndarray:
    """Moore-Penrose pseudo-inverse via the SVD.

    Singular values at or below ``rank_tol`` (default: max(n,p) * eps *
    s_max) are treated as zero.
    """
    u, s, v = svd(a)
    s_max = float(s[0]) if s.size else 0.0
    tol = default_rank_tol(np.shape(a), s_max) if rank_tol is None else rank_tol
    inv_s = np.where(s > tol, np.divide(1.0, s, where=s > 0.0, out=np.zeros_like(s)), 0.0)
    return (v * inv_s) @ u.T
