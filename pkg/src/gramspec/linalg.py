"""Dense linear-algebra kernels: top-r symmetric eigendecomposition, SVD,
and the orthogonal polar sign factor.

All kernels are deterministic pure functions backed by LAPACK (through
numpy), with a fixed eigenvector sign convention so repeated runs and
cross-module tests are bit-stable.  Matrices are plain 2-D float64
``numpy.ndarray`` objects in row-major order.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import NoConvergence, NonSymmetric, RankTooLarge


class EigenResult(NamedTuple):
    """Top-r eigenpairs: ``vectors`` is d x r columnwise orthonormal,
    ``values`` holds the r algebraically largest eigenvalues, descending."""

    vectors: np.ndarray
    values: np.ndarray


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D float64 array; raise ValueError otherwise."""
    a = np.asarray(m, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip column signs so each column's largest-magnitude entry
    (lowest index on ties) is positive.  Zero columns are left alone."""
    v = np.array(vectors, copy=True)
    for k in range(v.shape[1]):
        idx = int(np.argmax(np.abs(v[:, k])))  # argmax takes lowest index on ties
        if v[idx, k] < 0.0:
            v[:, k] = -v[:, k]
    return v


def sym_eig_topr(m, r: int, tol: float = 1e-12) -> EigenResult:
    """Top-r eigenpairs (algebraically largest) of a symmetric matrix.

    Parameters
    ----------
    m : (d, d) array_like
        Symmetric matrix; asymmetry beyond ``tol * (1 + max|m|)`` in any
        entry raises :class:`NonSymmetric`.
    r : int
        Number of leading eigenpairs, 1 <= r <= d.
    tol : float
        Relative entrywise symmetry tolerance.

    Returns
    -------
    EigenResult
        ``values`` descending; ``vectors`` orthonormal with the package
        sign convention applied.
    """
    a = as_matrix(m, "m")
    d = a.shape[0]
    if a.shape[1] != d:
        raise NonSymmetric(f"matrix is {a.shape[0]}x{a.shape[1]}, not square")
    if not (1 <= r <= d):
        raise RankTooLarge(f"r={r} outside [1, {d}]")
    asym = np.max(np.abs(a - a.T)) if d else 0.0
    if asym > tol * (1.0 + np.max(np.abs(a), initial=0.0)):
        raise NonSymmetric(f"asymmetry {asym:.3e} exceeds tolerance")
    try:
        w, v = np.linalg.eigh(a)  # ascending
    except np.linalg.LinAlgError as e:
        raise NoConvergence(str(e)) from e
    order = np.arange(d - 1, d - 1 - r, -1)
    values = w[order]
    vectors = fix_signs(v[:, order])
    return EigenResult(vectors=vectors, values=values)


def svd(m) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin SVD ``m = U diag(s) V^T`` with k = min(rows, cols) columns.

    Returns (U, s, V) with s descending and U, V columnwise orthonormal.
    """
    a = as_matrix(m, "m")
    try:
        u, s, vt = np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError as e:
        raise NoConvergence(str(e)) from e
    return u, s, vt.T


def polar_sign(h) -> np.ndarray:
    """Orthogonal polar sign factor ``Utilde @ Vtilde^T`` from the SVD of h.

    For invertible h this is the unique orthogonal polar factor (the
    orthogonal matrix closest to h); for rank-deficient h the result is a
    valid but non-unique orthonormal factor.  Use :func:`polar_min_sv` to
    detect that degeneracy.
    """
    u, _, v = svd(h)
    return u @ v.T


def polar_min_sv(h) -> float:
    """Smallest singular value of h; <= 1e-12 flags a degenerate polar factor."""
    _, s, _ = svd(h)
    return float(s[-1]) if s.size else 0.0


def spectral_norm(m) -> float:
    """Largest singular value (operator 2-norm)."""
    a = np.asarray(m, dtype=np.float64)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def two_inf_norm(m) -> float:
    """Maximum row l2 norm."""
    a = np.asarray(m, dtype=np.float64)
    if a.size == 0:
        return 0.0
    return float(np.max(np.sqrt(np.sum(a * a, axis=1))))
