"""Ground-truth construction, Bernoulli sampling with additive noise,
zero-filled observation matrices, and incoherence / conditioning diagnostics.

The observation model: each entry (i, j) of an unknown rank-r matrix is
revealed independently with probability p, corrupted by independent
zero-mean noise; unobserved entries are treated as zeros downstream.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import rng
from .errors import InvalidParameter, InvalidProbability, RankTooLarge
from .linalg import as_matrix, svd


@dataclass(frozen=True)
class NoiseSpec:
    """Entry noise: ``none``, ``gaussian`` (std sigma), or ``bounded_uniform``
    (uniform on [-r_max, r_max], std r_max/sqrt(3))."""

    kind: str = "none"
    sigma: float = 0.0
    r_max: float = 0.0

    def __post_init__(self):
        if self.kind not in ("none", "gaussian", "bounded_uniform"):
            raise InvalidParameter(f"unknown noise kind {self.kind!r}")
        if self.sigma < 0.0 or self.r_max < 0.0:
            raise InvalidParameter("noise magnitudes must be nonnegative")

    @staticmethod
    def none() -> "NoiseSpec":
        return NoiseSpec("none")

    @staticmethod
    def gaussian(sigma: float) -> "NoiseSpec":
        return NoiseSpec("gaussian", sigma=float(sigma))

    @staticmethod
    def bounded_uniform(r_max: float) -> "NoiseSpec":
        return NoiseSpec("bounded_uniform", r_max=float(r_max))

    @property
    def std(self) -> float:
        """Standard-deviation upper bound of one noise entry."""
        if self.kind == "gaussian":
            return self.sigma
        if self.kind == "bounded_uniform":
            return self.r_max / math.sqrt(3.0)
        return 0.0

    def draw(self, stream: rng.RandomStream, n: int) -> np.ndarray:
        if self.kind == "gaussian":
            return self.sigma * stream.normal(n)
        if self.kind == "bounded_uniform":
            return stream.uniform_symmetric(n, self.r_max)
        return np.zeros(n)


@dataclass(frozen=True, eq=False)
class LowRankTruth:
    """Rank-r ground truth with its compact SVD factors cached.

    ``astar = ustar @ diag(sigma_star) @ vstar.T`` to working precision;
    ``sigma_star`` strictly positive descending.
    """

    d1: int
    d2: int
    r: int
    ustar: np.ndarray
    sigma_star: np.ndarray
    vstar: np.ndarray
    astar: np.ndarray

    @property
    def kappa(self) -> float:
        return float(self.sigma_star[0] / self.sigma_star[-1])

    @staticmethod
    def from_matrix(astar, r: int) -> "LowRankTruth":
        """Build from a dense matrix by truncating its SVD at rank r."""
        a = as_matrix(astar, "astar")
        d1, d2 = a.shape
        if not (1 <= r <= min(d1, d2)):
            raise RankTooLarge(f"r={r} outside [1, {min(d1, d2)}]")
        u, s, v = svd(a)
        if s[r - 1] <= 0.0:
            raise InvalidParameter(f"matrix has rank < {r}")
        return LowRankTruth(d1=d1, d2=d2, r=r, ustar=u[:, :r],
                            sigma_star=s[:r].copy(), vstar=v[:, :r], astar=a)


@dataclass(frozen=True, eq=False)
class ObservationSet:
    """Sparse record of observed entries of a d1 x d2 matrix.

    Entries are canonicalized to (row, col) lexicographic order at
    construction; duplicate indices are rejected (the sampling model admits
    at most one observation per entry).
    """

    d1: int
    d2: int
    p: float
    rows: np.ndarray
    cols: np.ndarray
    values: np.ndarray
    p_is_estimated: bool = False

    def __post_init__(self):
        if not (0.0 < self.p <= 1.0):
            raise InvalidProbability(f"p={self.p} outside (0, 1]")
        rows = np.asarray(self.rows, dtype=np.int64)
        cols = np.asarray(self.cols, dtype=np.int64)
        values = np.asarray(self.values, dtype=np.float64)
        if not (rows.shape == cols.shape == values.shape) or rows.ndim != 1:
            raise InvalidParameter("rows/cols/values must be equal-length 1-D arrays")
        if rows.size:
            if rows.min() < 0 or rows.max() >= self.d1:
                raise InvalidParameter("row index out of range")
            if cols.min() < 0 or cols.max() >= self.d2:
                raise InvalidParameter("column index out of range")
            key = rows * self.d2 + cols
            if np.any(np.diff(key) <= 0):  # not strictly sorted: sort, then re-check
                order = np.argsort(key, kind="stable")
                rows, cols, values, key = rows[order], cols[order], values[order], key[order]
                if np.any(np.diff(key) == 0):
                    raise InvalidParameter("duplicate (i, j) observation")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return int(self.rows.size)

    @property
    def density(self) -> float:
        return len(self) / float(self.d1 * self.d2)

    def with_estimated_p(self) -> "ObservationSet":
        """Copy with p replaced by the plug-in estimate |Omega| / (d1 d2)."""
        p_hat = len(self) / float(self.d1 * self.d2)
        if p_hat <= 0.0:
            raise InvalidProbability("cannot estimate p from an empty observation set")
        return ObservationSet(self.d1, self.d2, p_hat, self.rows, self.cols,
                              self.values, p_is_estimated=True)

    @staticmethod
    def from_dense(a, p: float = 1.0) -> "ObservationSet":
        """Treat every entry of a dense matrix as observed."""
        a = as_matrix(a, "a")
        d1, d2 = a.shape
        rows, cols = np.divmod(np.arange(d1 * d2, dtype=np.int64), d2)
        return ObservationSet(d1, d2, p, rows, cols, a.ravel())


@dataclass(frozen=True)
class IncoherenceProfile:
    """Energy-spread diagnostics of a low-rank truth (all dimensionless)."""

    mu0: float
    mu1: float
    mu2: float
    mu: float
    kappa: float


def gen_lowrank_gaussian(d1: int, d2: int, r: int, seed: int) -> LowRankTruth:
    """Random rank-r truth Z1 @ Z2^T with i.i.d. standard normal factors.

    Z1 (d1 x r) is drawn first, then Z2 (d2 x r), both row-major, from the
    stream tagged ``"lowrank.factors"``.
    """
    if not (1 <= r <= min(d1, d2)):
        raise RankTooLarge(f"r={r} outside [1, {min(d1, d2)}]")
    s = rng.stream(seed, "lowrank.factors")
    z1 = s.normal_matrix(d1, r)
    z2 = s.normal_matrix(d2, r)
    return LowRankTruth.from_matrix(z1 @ z2.T, r)


def sample_observations(truth: LowRankTruth, p: float, noise: NoiseSpec,
                        seed: int) -> ObservationSet:
    """Bernoulli(p) mask over all entries plus per-entry noise.

    The mask stream is tagged ``"obs.mask"`` and the noise stream
    ``"obs.noise"``; noise is drawn only for observed entries, in (row, col)
    order, so the noiseless values are exact.
    """
    if not (0.0 < p <= 1.0):
        raise InvalidProbability(f"p={p} outside (0, 1]")
    mask = rng.stream(seed, "obs.mask").bernoulli_mask((truth.d1, truth.d2), p)
    rows, cols = np.nonzero(mask)  # row-major, already (i, j)-sorted
    values = truth.astar[rows, cols]
    if noise.kind != "none" and rows.size:
        values = values + noise.draw(rng.stream(seed, "obs.noise"), rows.size)
    return ObservationSet(truth.d1, truth.d2, p, rows, cols, values)


def zero_fill(obs: ObservationSet) -> np.ndarray:
    """Dense d1 x d2 matrix with observed values in place, zeros elsewhere."""
    a = np.zeros((obs.d1, obs.d2))
    a[obs.rows, obs.cols] = obs.values
    return a


def incoherence(truth: LowRankTruth) -> IncoherenceProfile:
    """Incoherence parameters and condition number of the truth.

    mu0 = d1 d2 max|A*_ij|^2 / ||A*||_F^2, mu1 = (d1/r) max_i ||U*^T e_i||^2,
    mu2 = (d2/r) max_j ||V*^T e_j||^2, mu = max of the three,
    kappa = sigma_1 / sigma_r.
    """
    a = truth.astar
    fro2 = float(np.sum(a * a))
    mu0 = truth.d1 * truth.d2 * float(np.max(a * a)) / fro2
    mu1 = truth.d1 / truth.r * float(np.max(np.sum(truth.ustar**2, axis=1)))
    mu2 = truth.d2 / truth.r * float(np.max(np.sum(truth.vstar**2, axis=1)))
    return IncoherenceProfile(mu0=mu0, mu1=mu1, mu2=mu2,
                              mu=max(mu0, mu1, mu2), kappa=truth.kappa)


def noise_spike_ratio(noise: NoiseSpec, d1: int, d2: int, p: float) -> float:
    """Report R^2/sigma^2 divided by min{p sqrt(d1 d2), p d2} / ln d, constant 1.

    For bounded noise R is the stated magnitude bound; for gaussian noise R is
    taken as the d^-12 tail quantile sigma * sqrt(24 ln d).  The caller judges
    the ratio against their own constant; nothing is enforced.  Returns 0 for
    noiseless specs.
    """
    if noise.kind == "none" or noise.std == 0.0:
        return 0.0
    d = max(d1, d2)
    log_d = math.log(d)
    if noise.kind == "gaussian":
        r2_over_s2 = 24.0 * log_d
    else:
        r2_over_s2 = noise.r_max**2 / noise.std**2  # = 3 for symmetric uniform
    rhs = min(p * math.sqrt(d1 * d2), p * d2) / log_d
    return r2_over_s2 / rhs


def save_observations(obs: ObservationSet, csv_path, meta_path) -> None:
    """Write entries as ``i,j,value`` CSV (0-based, round-trip floats) plus a
    JSON sidecar ``{d1, d2, p}``."""
    with open(csv_path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["i", "j", "value"])
        for i, j, v in zip(obs.rows, obs.cols, obs.values):
            w.writerow([int(i), int(j), repr(float(v))])
    meta = {"d1": obs.d1, "d2": obs.d2, "p": obs.p}
    Path(meta_path).write_text(json.dumps(meta) + "\n")


def load_observations(csv_path, meta_path) -> ObservationSet:
    meta = json.loads(Path(meta_path).read_text())
    rows, cols, values = [], [], []
    with open(csv_path, newline="") as f:
        rd = csv.reader(f)
        header = next(rd)
        if header[:3] != ["i", "j", "value"]:
            raise InvalidParameter(f"unexpected CSV header {header!r}")
        for rec in rd:
            rows.append(int(rec[0]))
            cols.append(int(rec[1]))
            values.append(float(rec[2]))
    return ObservationSet(int(meta["d1"]), int(meta["d2"]), float(meta["p"]),
                          np.array(rows, dtype=np.int64),
                          np.array(cols, dtype=np.int64),
                          np.array(values))
