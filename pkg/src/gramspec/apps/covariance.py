"""Covariance / principal-subspace estimation from incomplete samples.

Samples follow the factor model x_i = B* f_i + eta_i with isotropic factors
and independent noise, so the data matrix X = B* F + N is a noisy rank-r
matrix whose column space is the principal subspace of the population
covariance S* = B* B*^T.  With per-coordinate missingness applied to X, the
diagonal-deleted spectral method recovers the subspace; rescaling the
spectrum by 1/sqrt(n) turns it into a covariance estimate B B^T.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import rng
from ..errors import InvalidParameter, ShapeMismatch
from ..estimator import SubspaceEstimate, spectral_subspace
from ..linalg import as_matrix, spectral_norm, sym_eig_topr
from ..model import ObservationSet


@dataclass(frozen=True, eq=False)
class FactorModelTruth:
    """Loading matrix B* (d x r) with its population covariance
    S* = B* B*^T = U* diag(lam) U*^T and conditioning diagnostics."""

    d: int
    r: int
    n: int
    bstar: np.ndarray
    sstar: np.ndarray
    ustar: np.ndarray
    lam: np.ndarray

    @property
    def kappa_ce(self) -> float:
        return float(self.lam[0] / self.lam[-1])

    @property
    def mu_ce(self) -> float:
        return self.d / self.r * float(np.max(np.sum(self.ustar**2, axis=1)))


def gen_factor_truth(d: int, r: int, n: int, seed: int) -> FactorModelTruth:
    """Loading matrix with i.i.d. standard normal entries (stream
    ``"cov.loading"``), eigendecomposed for the subspace truth."""
    if not (1 <= r <= d) or n < 1:
        raise InvalidParameter("need 1 <= r <= d and n >= 1")
    bstar = rng.stream(seed, "cov.loading").normal_matrix(d, r)
    return factor_truth_from_loading(bstar, n)


def factor_truth_from_loading(bstar, n: int) -> FactorModelTruth:
    bstar = as_matrix(bstar, "bstar")
    d, r = bstar.shape
    sstar = bstar @ bstar.T
    eig = sym_eig_topr(sstar, r)
    if eig.values[-1] <= 0.0:
        raise InvalidParameter("loading matrix is rank deficient")
    return FactorModelTruth(d=d, r=r, n=int(n), bstar=bstar, sstar=sstar,
                            ustar=eig.vectors, lam=eig.values)


def gen_factor_data(truth: FactorModelTruth, sigma: float,
                    seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Sample matrix X = B* F + sigma * N (d x n) with standard normal F
    (stream ``"cov.factors"``) and N (stream ``"cov.noise"``); also returns
    the realized factor matrix F."""
    if sigma < 0.0:
        raise InvalidParameter("sigma must be nonnegative")
    f = rng.stream(seed, "cov.factors").normal_matrix(truth.r, truth.n)
    x = truth.bstar @ f
    if sigma > 0.0:
        x = x + sigma * rng.stream(seed, "cov.noise").normal_matrix(truth.d, truth.n)
    return x, f


def gen_factor_samples(truth: FactorModelTruth, sigma: float, seed: int) -> np.ndarray:
    """Sample matrix X = B* F + sigma * N (see :func:`gen_factor_data`)."""
    return gen_factor_data(truth, sigma, seed)[0]


def cov_estimate(obs_x: ObservationSet, r: int,
                 n: int) -> tuple[SubspaceEstimate, np.ndarray]:
    """Diagonal-deleted subspace estimate plus the covariance estimate
    S = B B^T with B = (1/sqrt(n)) U diag(sigma); S is symmetric PSD of
    rank <= r by construction."""
    if n < 1:
        raise InvalidParameter("need n >= 1")
    est = spectral_subspace(obs_x, r)
    b = est.u * (est.sigma / np.sqrt(n))
    return est, b @ b.T


def cov_truth_metrics(s, sstar, r: int) -> dict[str, float]:
    """Operator and entrywise errors of a covariance estimate.

    ``op_rel`` divides by ||S*|| and ``inf_rel`` by lambda_1 * mu_ce * r / d
    (the natural entrywise scale of an incoherent rank-r covariance); both
    are reported raw, interpretation is the caller's.
    """
    s = as_matrix(s, "s")
    sstar = as_matrix(sstar, "sstar")
    if s.shape != sstar.shape or s.shape[0] != s.shape[1]:
        raise ShapeMismatch(f"shapes {s.shape} and {sstar.shape} must be equal and square")
    d = s.shape[0]
    if not (1 <= r <= d):
        raise InvalidParameter(f"r={r} outside [1, {d}]")
    op_err = spectral_norm(s - sstar)
    inf_err = float(np.max(np.abs(s - sstar)))
    eig = sym_eig_topr(sstar, r)
    lam1 = float(eig.values[0])
    u2inf_sq = float(np.max(np.sum(eig.vectors**2, axis=1)))  # = mu_ce * r / d
    return {
        "op_err": op_err,
        "inf_err": inf_err,
        "op_rel": op_err / spectral_norm(sstar),
        "inf_rel": inf_err / (lam1 * u2inf_sq),
    }
