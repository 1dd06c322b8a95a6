"""Spectral estimators built on the diagonal-deleted sample Gram matrix.

Given a zero-filled observation matrix A of an unknown rank-r truth with
sampling rate p, the rescaled Gram matrix (1/p^2) A A^T is an entrywise
unbiased estimate of the true Gram matrix everywhere except on its diagonal,
which is inflated by sampling and noise variance.  Zeroing the diagonal
before the rank-r eigendecomposition removes that bias at the price of a
small, dimension-vanishing subspace distortion; the top-r eigenvectors then
estimate the column subspace and the square roots of the eigenvalues
estimate the leading singular values.

The leave-one-out / leave-two-out constructions replace a row (and a
column) of the data with its expectation.  They require the ground truth
and exist purely as numerical diagnostics: the estimates they produce
should hug the full-data estimate far more tightly than either hugs the
truth.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse

from .errors import IndexOutOfRange, InvalidParameter, RankTooLarge
from .linalg import sym_eig_topr, svd
from .model import LowRankTruth, ObservationSet, zero_fill

# below this observed density the Gram product is accumulated sparsely;
# purely a performance knob, both paths agree to float precision
SPARSE_GRAM_DENSITY = 0.05

DEGENERACY_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class GramMatrix:
    """Diagonal-deleted rescaled Gram matrix; symmetric with an exactly
    zero diagonal by construction."""

    d1: int
    g: np.ndarray
    p_used: float


@dataclass(frozen=True, eq=False)
class SubspaceEstimate:
    """Rank-r subspace/spectrum estimate.

    ``sigma[k] = sqrt(max(lambda_raw[k], 0))``; ``clamped`` counts negative
    eigenvalues zeroed by that clamp, and ``degenerate`` flags
    ``lambda_r <= 1e-12 * max(1, |lambda_1|)`` (estimate unreliable, but
    still returned so downstream metrics remain computable).
    """

    u: np.ndarray
    sigma: np.ndarray
    lambda_raw: np.ndarray
    clamped: int
    degenerate: bool


@dataclass(frozen=True, eq=False)
class LeaveOutDiagnostics:
    """Leave-one-out (or leave-two-out) estimate and its proximity to the
    full-data estimate, ``proximity_fro = ||U_loo U_loo^T - U U^T||_F``."""

    m: int
    u_loo: np.ndarray
    proximity_fro: float
    h_loo: np.ndarray
    l: int | None = None


def _offdiag_symmetrize(m: np.ndarray) -> np.ndarray:
    """Zero the diagonal and mirror the upper triangle for bit-exact symmetry."""
    upper = np.triu(m, 1)
    return upper + upper.T


def gram_offdiag(obs: ObservationSet) -> GramMatrix:
    """Diagonal-deleted Gram matrix (1/p^2) * offdiag(A A^T) of the
    zero-filled observations.

    Sparse observation sets accumulate the product through a CSR matmul,
    dense ones through BLAS; either way the upper triangle is computed once
    and mirrored, so the result is bit-exactly symmetric with a bit-exact
    zero diagonal.
    """
    if obs.d1 < 2:
        raise InvalidParameter("need d1 >= 2 for an off-diagonal Gram matrix")
    if obs.density < SPARSE_GRAM_DENSITY:
        a = scipy.sparse.csr_matrix(
            (obs.values, (obs.rows, obs.cols)), shape=(obs.d1, obs.d2))
        prod = (a @ a.T).toarray()
    else:
        a = zero_fill(obs)
        prod = a @ a.T
    g = _offdiag_symmetrize(prod / (obs.p * obs.p))
    return GramMatrix(d1=obs.d1, g=g, p_used=obs.p)


def _estimate_from_eig(vectors: np.ndarray, values: np.ndarray) -> SubspaceEstimate:
    lam = np.asarray(values, dtype=np.float64)
    clamped = int(np.sum(lam < 0.0))
    sigma = np.sqrt(np.maximum(lam, 0.0))
    degenerate = bool(lam[-1] <= DEGENERACY_RTOL * max(1.0, abs(lam[0])))
    return SubspaceEstimate(u=vectors, sigma=sigma, lambda_raw=lam,
                            clamped=clamped, degenerate=degenerate)


def spectral_subspace(obs: ObservationSet, r: int) -> SubspaceEstimate:
    """Rank-r subspace estimate from the diagonal-deleted Gram matrix."""
    if not (1 <= r <= obs.d1):
        raise RankTooLarge(f"r={r} outside [1, {obs.d1}]")
    eig = sym_eig_topr(gram_offdiag(obs).g, r)
    return _estimate_from_eig(eig.vectors, eig.values)


def vanilla_subspace(obs: ObservationSet, r: int) -> SubspaceEstimate:
    """Baseline: top-r left singular subspace of (1/p) * zero_fill(obs).

    No diagonal handling; ``lambda_raw`` holds the squared singular values
    and the clamp is vacuously inactive.
    """
    if not (1 <= r <= min(obs.d1, obs.d2)):
        raise RankTooLarge(f"r={r} outside [1, {min(obs.d1, obs.d2)}]")
    u, s, _ = svd(zero_fill(obs) / obs.p)
    sigma = s[:r].copy()
    lam = sigma * sigma
    degenerate = bool(lam[-1] <= DEGENERACY_RTOL * max(1.0, abs(lam[0])))
    return SubspaceEstimate(u=u[:, :r], sigma=sigma, lambda_raw=lam,
                            clamped=0, degenerate=degenerate)


def loo_observation(obs: ObservationSet, truth: LowRankTruth, m: int) -> np.ndarray:
    """Zero-filled observations with row m replaced by its expectation
    p * A*_{m,:}."""
    if not (0 <= m < obs.d1):
        raise IndexOutOfRange(f"row {m} outside [0, {obs.d1})")
    a = zero_fill(obs)
    a[m, :] = obs.p * truth.astar[m, :]
    return a


def loo2_observation(obs: ObservationSet, truth: LowRankTruth, m: int,
                     l: int) -> np.ndarray:
    """Zero-filled observations with row m and column l replaced by their
    expectations p * A*."""
    if not (0 <= m < obs.d1):
        raise IndexOutOfRange(f"row {m} outside [0, {obs.d1})")
    if not (0 <= l < obs.d2):
        raise IndexOutOfRange(f"column {l} outside [0, {obs.d2})")
    a = zero_fill(obs)
    a[m, :] = obs.p * truth.astar[m, :]
    a[:, l] = obs.p * truth.astar[:, l]
    return a


def _leave_out_diag(a_replaced: np.ndarray, obs: ObservationSet,
                    truth: LowRankTruth, m: int, r: int,
                    l: int | None) -> LeaveOutDiagnostics:
    prod = a_replaced @ a_replaced.T
    g_loo = _offdiag_symmetrize(prod / (obs.p * obs.p))
    u_loo = sym_eig_topr(g_loo, r).vectors
    u = spectral_subspace(obs, r).u
    prox = float(np.linalg.norm(u_loo @ u_loo.T - u @ u.T, "fro"))
    return LeaveOutDiagnostics(m=m, u_loo=u_loo, proximity_fro=prox,
                               h_loo=u_loo.T @ truth.ustar, l=l)


def loo_subspace(obs: ObservationSet, truth: LowRankTruth, m: int,
                 r: int) -> LeaveOutDiagnostics:
    """Leave-one-out diagnostic: rank-r estimate with row m replaced by its
    expectation, compared against the full-data estimate."""
    return _leave_out_diag(loo_observation(obs, truth, m), obs, truth, m, r, None)


def loo2_subspace(obs: ObservationSet, truth: LowRankTruth, m: int, l: int,
                  r: int) -> LeaveOutDiagnostics:
    """Leave-two-out diagnostic: row m and column l replaced by their
    expectations."""
    return _leave_out_diag(loo2_observation(obs, truth, m, l), obs, truth, m, r, l)
