"""Symmetric order-3 tensor completion via mode-1 unfolding.

A symmetric rank-r tensor T = sum_s w_s (x) w_s (x) w_s unfolds along its
first index into a d x d^2 matrix whose column space is exactly the span of
the factors {w_s}.  Estimating that span from partial noisy entries of T is
therefore a (very fat) instance of the core subspace problem: sample each of
the d^3 ordered entries independently, unfold, and run the diagonal-deleted
spectral method.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .. import rng
from ..errors import InvalidParameter, RankDeficient, ShapeMismatch
from ..estimator import SubspaceEstimate, spectral_subspace
from ..linalg import as_matrix, svd
from ..metrics import AlignmentResult, align
from ..model import NoiseSpec, ObservationSet

# dense d^3 storage cap; above this the tensor no longer fits desk scale
MAX_DENSE_DIM = 150


@dataclass(frozen=True, eq=False)
class TensorTruth:
    """Rank-r symmetric tensor truth with its dense d x d x d array.

    ``t[i, j, k] = sum_s w[i, s] w[j, s] w[k, s]``; component strengths are
    ``||w_s||^3`` and ``kappa_tc`` is their max/min ratio.
    """

    d: int
    r: int
    w: np.ndarray
    t: np.ndarray
    lambda_min: float
    lambda_max: float

    @property
    def kappa_tc(self) -> float:
        return self.lambda_max / self.lambda_min

    def unfolded(self) -> np.ndarray:
        """Mode-1 unfolding of the truth (a view, no copy)."""
        return self.t.reshape(self.d, self.d * self.d)


@dataclass(frozen=True)
class TensorIncoherence:
    """Tensor energy-spread parameters; ``mu_tc = max(mu3, mu4^2)``."""

    mu3: float
    mu4: float
    mu5: float
    mu_tc: float


def make_tensor_truth(w) -> TensorTruth:
    """Build the dense symmetric tensor from factor columns w (d x r)."""
    w = as_matrix(w, "w")
    d, r = w.shape
    if d > MAX_DENSE_DIM:
        raise InvalidParameter(f"d={d} exceeds the dense-tensor cap {MAX_DENSE_DIM}")
    norms = np.sqrt(np.sum(w * w, axis=0))
    if np.min(norms) <= 0.0:
        raise InvalidParameter("every factor column must be nonzero")
    t = np.einsum("is,js,ks->ijk", w, w, w)
    lam = norms**3
    return TensorTruth(d=d, r=r, w=w, t=t,
                       lambda_min=float(np.min(lam)), lambda_max=float(np.max(lam)))


def mode1_unfold(t) -> np.ndarray:
    """Flatten a cubical order-3 array into d x d^2, entry (i, j, k) landing
    in column j*d + k (0-based).  Pure relayout, no arithmetic."""
    t = np.asarray(t, dtype=np.float64)
    if t.ndim != 3 or len(set(t.shape)) != 1:
        raise ShapeMismatch(f"expected a cubical order-3 array, got shape {t.shape}")
    d = t.shape[0]
    return np.ascontiguousarray(t).reshape(d, d * d)


def mode1_refold(a) -> np.ndarray:
    """Inverse of :func:`mode1_unfold`."""
    a = as_matrix(a, "a")
    d = a.shape[0]
    if a.shape[1] != d * d:
        raise ShapeMismatch(f"expected d x d^2, got {a.shape}")
    return a.reshape(d, d, d)


def tensor_truth_subspace(w) -> np.ndarray:
    """Orthonormal basis W (W^T W)^{-1/2} of the factor span (equals the
    left singular vectors of W)."""
    w = as_matrix(w, "w")
    u, s, v = svd(w)
    if s[-1] <= 1e-10:
        raise RankDeficient("factor matrix is (numerically) rank deficient")
    return u @ v.T  # = W (W^T W)^{-1/2}


def tensor_incoherence(truth: TensorTruth) -> TensorIncoherence:
    """mu3 (entrywise spread of T), mu4 (factor spikiness), mu5 (factor
    cross-correlation; 0 when r = 1 or the factors are orthogonal)."""
    w, d = truth.w, truth.d
    fro2 = float(np.sum(truth.t**2))
    mu3 = d**3 * float(np.max(truth.t**2)) / fro2
    col_norm2 = np.sum(w * w, axis=0)
    mu4 = d * float(np.max(np.max(w * w, axis=0) / col_norm2))
    if truth.r > 1:
        gram = w.T @ w
        cross = gram**2 / np.outer(col_norm2, col_norm2)
        np.fill_diagonal(cross, 0.0)
        mu5 = d * float(np.max(cross))
    else:
        mu5 = 0.0
    return TensorIncoherence(mu3=mu3, mu4=mu4, mu5=mu5, mu_tc=max(mu3, mu4**2))


def sample_tensor(truth: TensorTruth, p: float, noise: NoiseSpec,
                  seed: int) -> ObservationSet:
    """Observe each ordered entry (i, j, k) independently with probability p,
    plus noise on observed entries only, returned as observations of the
    mode-1 unfolding.

    Streams: mask ``"tensor.mask"``, noise ``"tensor.noise"``; the mask is
    drawn in unfolded row-major order, which is exactly (i, j, k) ordered.
    """
    d = truth.d
    astar = truth.unfolded()
    mask = rng.stream(seed, "tensor.mask").bernoulli_mask((d, d * d), p)
    rows, cols = np.nonzero(mask)
    values = astar[rows, cols]
    if noise.kind != "none" and rows.size:
        values = values + noise.draw(rng.stream(seed, "tensor.noise"), rows.size)
    return ObservationSet(d, d * d, p, rows, cols, values)


def tensor_pipeline(w, p: float, noise: NoiseSpec, seed: int,
                    r: int) -> tuple[SubspaceEstimate, AlignmentResult, TensorIncoherence]:
    """Full adapter: build truth, sample, unfold, estimate, align.

    Returns the subspace estimate, its alignment against the orthonormalized
    factor span, and the tensor incoherence parameters.
    """
    truth = make_tensor_truth(w)
    obs = sample_tensor(truth, p, noise, seed)
    est = spectral_subspace(obs, r)
    alignment = align(est.u, tensor_truth_subspace(truth.w))
    return est, alignment, tensor_incoherence(truth)


def save_tensor_observations(obs: ObservationSet, d: int, csv_path, meta_path) -> None:
    """Write observed tensor entries as ``i,j,k,value`` (0-based) with a JSON
    sidecar ``{d, p}``; indices are recovered from the unfolded columns."""
    if obs.d1 != d or obs.d2 != d * d:
        raise ShapeMismatch("observation set is not an unfolded d x d^2 tensor")
    with open(csv_path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["i", "j", "k", "value"])
        for i, c, v in zip(obs.rows, obs.cols, obs.values):
            w.writerow([int(i), int(c) // d, int(c) % d, repr(float(v))])
    Path(meta_path).write_text(json.dumps({"d": d, "p": obs.p}) + "\n")


def load_tensor_observations(csv_path, meta_path) -> ObservationSet:
    """Read the ``i,j,k,value`` format back as unfolded observations."""
    meta = json.loads(Path(meta_path).read_text())
    d, p = int(meta["d"]), float(meta["p"])
    rows, cols, values = [], [], []
    with open(csv_path, newline="") as f:
        rd = csv.reader(f)
        header = next(rd)
        if header[:4] != ["i", "j", "k", "value"]:
            raise InvalidParameter(f"unexpected CSV header {header!r}")
        for rec in rd:
            rows.append(int(rec[0]))
            cols.append(int(rec[1]) * d + int(rec[2]))
            values.append(float(rec[3]))
    return ObservationSet(d, d * d, p, np.array(rows, dtype=np.int64),
                          np.array(cols, dtype=np.int64), np.array(values))
