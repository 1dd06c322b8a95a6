"""Subspace alignment, error metrics, and theory-bound evaluators.

Alignment uses the orthogonal polar sign factor of H = U^T U*, which
minimizes ||U Q - U*|| over orthogonal Q simultaneously in the Frobenius
and spectral norms.  The bound evaluators reproduce the guarantee formulas
verbatim with every unspecified absolute constant set to 1 and natural
logarithms throughout; the condition checkers likewise return ratios of
each condition's left side to its right side with constants 1, leaving the
pass/fail judgment (i.e. the choice of constants) to the caller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter, ShapeMismatch
from .linalg import as_matrix, spectral_norm, svd, two_inf_norm

POLAR_DEGENERACY_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class AlignmentResult:
    """Optimal rotation and the standard subspace error metrics.

    ``err_spec = ||U R - U*||`` (spectral) attains ``min_Q ||U Q - U*||``;
    ``err_l2inf`` is the max row l2 norm of the aligned difference;
    ``sin_theta = ||U U^T - U* U*^T||``; relative variants divide by
    ``||U*||`` and ``||U*||_{2,inf}``.  ``h_degenerate`` flags a
    rank-deficient H = U^T U* (rotation non-unique).
    """

    r_opt: np.ndarray
    err_spec: float
    err_l2inf: float
    err_spec_rel: float
    err_l2inf_rel: float
    sin_theta: float
    h_degenerate: bool


@dataclass(frozen=True)
class TheoryInputs:
    """Parameters entering the general guarantee for the matrix problem.

    ``mu`` plays the role of every incoherence parameter (including the
    mu_1 appearing in the rank condition and the diagonal-deletion term,
    a deliberately conservative substitution); ``sigma`` is the noise std
    bound and ``sigma_r_star`` the smallest nonzero singular value.
    """

    mu: float
    kappa: float
    r: int
    d1: int
    d2: int
    p: float
    sigma: float
    sigma_r_star: float

    def __post_init__(self):
        if min(self.mu, self.kappa, self.r, self.d1, self.d2) <= 0:
            raise InvalidParameter("mu, kappa, r, d1, d2 must be positive")
        if not (0.0 < self.p <= 1.0):
            raise InvalidParameter(f"p={self.p} outside (0, 1]")
        if self.sigma < 0.0 or self.sigma_r_star <= 0.0:
            raise InvalidParameter("need sigma >= 0 and sigma_r_star > 0")

    @property
    def log_d(self) -> float:
        return math.log(max(self.d1, self.d2))


@dataclass(frozen=True)
class BoundBreakdown:
    """A guarantee value split into its sources; total is their sum."""

    missing_data: float
    noise: float
    diag_deletion: float

    @property
    def total(self) -> float:
        return self.missing_data + self.noise + self.diag_deletion


def align(u, ustar, orth_tol: float = 1e-8) -> AlignmentResult:
    """Optimally rotate the estimate onto the truth and report error metrics.

    Parameters
    ----------
    u, ustar : (d, r) array_like
        Columnwise orthonormal (within ``orth_tol``) estimate and truth.
    """
    u = as_matrix(u, "u")
    ustar = as_matrix(ustar, "ustar")
    if u.shape != ustar.shape:
        raise ShapeMismatch(f"shapes {u.shape} and {ustar.shape} differ")
    r = u.shape[1]
    for name, m in (("u", u), ("ustar", ustar)):
        if spectral_norm(m.T @ m - np.eye(r)) > orth_tol:
            raise ShapeMismatch(f"{name} is not columnwise orthonormal")
    uu, s, v = svd(u.T @ ustar)
    r_opt = uu @ v.T
    diff = u @ r_opt - ustar
    err_spec = spectral_norm(diff)
    err_l2inf = two_inf_norm(diff)
    norm_star = spectral_norm(ustar)
    norm_star_2inf = two_inf_norm(ustar)
    return AlignmentResult(
        r_opt=r_opt,
        err_spec=err_spec,
        err_l2inf=err_l2inf,
        err_spec_rel=err_spec / norm_star,
        err_l2inf_rel=err_l2inf / norm_star_2inf,
        sin_theta=spectral_norm(u @ u.T - ustar @ ustar.T),
        h_degenerate=bool(s[-1] <= POLAR_DEGENERACY_TOL),
    )


def spectrum_error(sigma_hat, sigma_star) -> float:
    """max_i |sigma_hat_i - sigma_star_i| (spectral norm of the diagonal gap)."""
    a = np.asarray(sigma_hat, dtype=np.float64)
    b = np.asarray(sigma_star, dtype=np.float64)
    if a.shape != b.shape:
        raise ShapeMismatch(f"spectra of lengths {a.size} and {b.size}")
    return float(np.max(np.abs(a - b))) if a.size else 0.0


def bound_general(inputs: TheoryInputs,
                  drop_sampling_terms_at_p1: bool = False) -> BoundBreakdown:
    """General subspace-error guarantee, constants 1, natural logs.

    missing_data = mu k^2 r ln d / (sqrt(d1 d2) p) + sqrt(mu k^4 r ln d / (d2 p))
    noise        = (s/s_r)^2 sqrt(d1 d2) ln d / p + (s k / s_r) sqrt(d1 ln d / p)
    diag_deletion= mu k^2 r / d1

    With ``drop_sampling_terms_at_p1`` and p = 1, the two missing-data terms
    are removed (the guarantee holds without them when nothing is missing);
    by default the formula is evaluated verbatim.
    """
    t = inputs
    ld = t.log_d
    missing = (t.mu * t.kappa**2 * t.r * ld / (math.sqrt(t.d1 * t.d2) * t.p)
               + math.sqrt(t.mu * t.kappa**4 * t.r * ld / (t.d2 * t.p)))
    if drop_sampling_terms_at_p1 and t.p == 1.0:
        missing = 0.0
    snr = t.sigma / t.sigma_r_star
    noise = (snr**2 * math.sqrt(t.d1 * t.d2) * ld / t.p
             + snr * t.kappa * math.sqrt(t.d1 * ld / t.p))
    diag = t.mu * t.kappa**2 * t.r / t.d1
    return BoundBreakdown(missing_data=missing, noise=noise, diag_deletion=diag)


def bound_tc(mu_tc: float, kappa_tc: float, r: int, d: int, p: float,
             sigma: float, lambda_min: float) -> BoundBreakdown:
    """Tensor-completion guarantee for the mode-1 unfolded problem.

    Evaluated verbatim with constants 1 and natural logs; the
    diagonal-deletion term's entrywise factor parameter is taken equal to
    ``mu_tc``.
    """
    if min(mu_tc, kappa_tc, r, d, p, lambda_min) <= 0:
        raise InvalidParameter("all tensor bound parameters must be positive")
    if sigma < 0:
        raise InvalidParameter("sigma must be nonnegative")
    ld = math.log(d)
    missing = (mu_tc * kappa_tc**2 * r * ld / (d**1.5 * p)
               + math.sqrt(mu_tc * kappa_tc**4 * r * ld / (d**2 * p)))
    snr = sigma / lambda_min
    noise = snr**2 * d**1.5 * ld / p + snr * kappa_tc * math.sqrt(d * ld / p)
    diag = mu_tc * kappa_tc**2 * r / d
    return BoundBreakdown(missing_data=missing, noise=noise, diag_deletion=diag)


def bound_ce(mu_ce: float, kappa_ce: float, r: int, d: int, n: int, p: float,
             sigma: float, lambda_r: float) -> BoundBreakdown:
    """Covariance-estimation guarantee; logs are ln(n + d)."""
    if min(mu_ce, kappa_ce, r, d, n, p, lambda_r) <= 0:
        raise InvalidParameter("all covariance bound parameters must be positive")
    if sigma < 0:
        raise InvalidParameter("sigma must be nonnegative")
    lnd = math.log(n + d)
    missing = (mu_ce * kappa_ce**2 * r * lnd**2 / (math.sqrt(d * n) * p)
               + math.sqrt(mu_ce * kappa_ce**3 * r * lnd**2 / (n * p)))
    noise = (sigma**2 / lambda_r * math.sqrt(d / n) * lnd / p
             + sigma / math.sqrt(lambda_r) * math.sqrt(d / n)
             * math.sqrt(kappa_ce * lnd / p))
    diag = mu_ce * kappa_ce * r / d
    return BoundBreakdown(missing_data=missing, noise=noise, diag_deletion=diag)


def bound_bsbm(qin: float, qout: float, nu: int, nv: int) -> float:
    """Bipartite-SBM misalignment guarantee; logs are ln(nu + nv).

    Diverges as the edge densities merge; qin = qout is rejected outright.
    """
    if not (0.0 <= qout <= qin <= 1.0):
        raise InvalidParameter("need 0 <= qout <= qin <= 1")
    if qin == qout:
        raise InvalidParameter("qin = qout carries no community signal")
    if nu <= 0 or nv <= 0:
        raise InvalidParameter("nu, nv must be positive")
    if qin <= 0.0:
        raise InvalidParameter("qin must be positive")
    gap = qin - qout
    ln_n = math.log(nu + nv)
    return (qin / gap**2 * ln_n / math.sqrt(nu * nv)
            + math.sqrt(qin) / gap * math.sqrt(ln_n / nv)
            + 1.0 / math.sqrt(nu))


def check_conditions(inputs: TheoryInputs) -> dict[str, float]:
    """Ratios (left side / right side, constants 1) of the three guarantee
    preconditions: sampling rate, noise level, rank.

    Ratios below the caller's constant mean the condition fails; the noise
    ratio is inverted relative to the other two (smaller is better), i.e.
    it reports (sigma/sigma_r) divided by its ceiling.
    """
    t = inputs
    ld = t.log_d
    p_floor = max(t.mu * t.kappa**4 * t.r * ld**2 / math.sqrt(t.d1 * t.d2),
                  t.mu * t.kappa**8 * t.r * ld**2 / t.d2)
    noise_ceiling = min(math.sqrt(t.p) / (t.kappa * (t.d1 * t.d2)**0.25 * math.sqrt(ld)),
                        math.sqrt(t.p / (t.d1 * ld)) / t.kappa**3)
    rank_ceiling = t.d1 / (t.mu * t.kappa**4)
    return {
        "p_ratio": t.p / p_floor,
        "noise_ratio": (t.sigma / t.sigma_r_star) / noise_ceiling,
        "rank_ratio": t.r / rank_ceiling,
    }
