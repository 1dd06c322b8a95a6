"""Declarative Monte Carlo experiment runner.

An :class:`ExperimentSpec` names a sweep kind, fixed parameters, the swept
values, a trial count, and a seed.  Each (sweep value, trial) pair derives
its own random seed, generates fresh data, runs every requested method on
that same data, and emits one :class:`TrialRecord` per metric.  Records are
merged in canonical (value, trial, method, metric) order, so output is a
pure function of (spec, seed) regardless of thread count.  Degenerate or
failed trials record NA instead of aborting the sweep.
"""

from __future__ import annotations

import csv
import json
import math
import os
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import rng
from .apps.bsbm import bsbm_evaluate, bsbm_recover, gen_bsbm
from .apps.covariance import cov_truth_metrics, gen_factor_data, gen_factor_truth
from .apps.tensor import (make_tensor_truth, sample_tensor, tensor_incoherence,
                          tensor_truth_subspace)
from .errors import ConfigInvalid, GramspecError
from .estimator import spectral_subspace, vanilla_subspace
from .linalg import sym_eig_topr
from .metrics import (TheoryInputs, align, bound_bsbm, bound_ce, bound_general,
                      bound_tc, spectrum_error)
from .model import (NoiseSpec, ObservationSet, gen_lowrank_gaussian,
                    incoherence)

METHODS = ("diagonal_deleted", "vanilla")

SUBSPACE_METRICS = ("err_spec", "err_l2inf", "err_spec_rel", "err_l2inf_rel",
                    "sin_theta", "spectrum_err")
COV_EXTRA_METRICS = ("cov_op_err", "cov_op_rel", "cov_inf_err", "cov_inf_rel")
BSBM_METRICS = ("exact", "misclass_rate")

# kind -> (swept parameter, required fixed parameters, optional fixed parameters)
KINDS = {
    "matrix_sweep_p": ("p", ("d1", "d2", "r", "sigma"), ()),
    "matrix_sweep_d2": ("d2", ("d1", "r", "sigma"), ("p",)),
    "matrix_sweep_sigma": ("sigma", ("d1", "d2", "r", "p"), ()),
    "tensor_sweep_p": ("p", ("d", "r", "sigma"), ()),
    "tensor_sweep_sigma": ("sigma", ("d", "r", "p"), ()),
    "cov_sweep_p": ("p", ("d", "r", "n", "sigma"), ()),
    "cov_sweep_n": ("n", ("d", "r", "sigma", "p"), ()),
    "cov_sweep_sigma": ("sigma", ("d", "r", "n", "p"), ()),
    "bsbm_sweep_a": ("a", ("nu", "nv", "b"), ()),
    "bsbm_sweep_nv": ("nv", ("nu", "a", "b"), ()),
}

_INT_PARAMS = {"d1", "d2", "d", "r", "n", "nu", "nv"}

CSV_HEADER = ["experiment", "param", "value", "trial", "method", "metric", "result"]


@dataclass(frozen=True)
class TrialRecord:
    """One metric value from one method on one trial at one sweep point."""

    experiment: str
    param: str
    value: float
    trial: int
    method: str
    metric: str
    result: float  # NaN encodes NA


@dataclass(frozen=True)
class SummaryRow:
    """Aggregate over trials for one (value, method, metric) cell."""

    param: str
    value: float
    method: str
    metric: str
    mean: float
    median: float
    std: float
    na_count: int


@dataclass(frozen=True)
class ExperimentSpec:
    """Validated sweep configuration; see :data:`KINDS` for the vocabulary."""

    kind: str
    params: dict
    sweep: tuple
    trials: int = 100
    seed: int = 0
    methods: tuple = ("diagonal_deleted",)
    include_bounds: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigInvalid(f"unknown experiment kind {self.kind!r}")
        sweep_param, required, optional = KINDS[self.kind]
        missing = [k for k in required if k not in self.params]
        if missing:
            raise ConfigInvalid(f"{self.kind} needs parameters {missing}")
        unknown = [k for k in self.params
                   if k not in required and k not in optional]
        if unknown:
            raise ConfigInvalid(f"unexpected parameters {unknown} for {self.kind}")
        if not self.sweep:
            raise ConfigInvalid("sweep values must be nonempty")
        vals = [float(v) for v in self.sweep]
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ConfigInvalid("sweep values must be strictly increasing")
        if sweep_param in _INT_PARAMS and any(not float(v).is_integer() for v in vals):
            raise ConfigInvalid(f"swept parameter {sweep_param!r} takes integers")
        if self.trials < 1:
            raise ConfigInvalid("trials must be >= 1")
        bad = [m for m in self.methods if m not in METHODS]
        if bad or not self.methods:
            raise ConfigInvalid(f"methods must be a nonempty subset of {METHODS}")
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "sweep", tuple(self.sweep))
        object.__setattr__(self, "params", dict(self.params))

    @property
    def sweep_param(self) -> str:
        return KINDS[self.kind][0]

    @staticmethod
    def from_dict(d: dict) -> "ExperimentSpec":
        try:
            return ExperimentSpec(
                kind=d["kind"],
                params=dict(d.get("params", {})),
                sweep=tuple(d["sweep"]),
                trials=int(d.get("trials", 100)),
                seed=int(d.get("seed", 0)),
                methods=tuple(d.get("methods", ("diagonal_deleted",))),
                include_bounds=bool(d.get("include_bounds", False)),
            )
        except KeyError as e:
            raise ConfigInvalid(f"spec is missing required key {e}") from e

    @staticmethod
    def from_file(path) -> "ExperimentSpec":
        try:
            payload = json.loads(Path(path).read_text())
        except json.JSONDecodeError as e:
            raise ConfigInvalid(f"spec file is not valid JSON: {e}") from e
        return ExperimentSpec.from_dict(payload)


def metric_names(spec: ExperimentSpec) -> tuple:
    """Canonical metric order for one method-trial of this experiment."""
    if spec.kind.startswith("bsbm"):
        names = BSBM_METRICS
    elif spec.kind.startswith("cov"):
        names = SUBSPACE_METRICS + COV_EXTRA_METRICS
    else:
        names = SUBSPACE_METRICS
    if spec.include_bounds:
        names = names + ("bound_total",)
    return names


def fig1b_sampling_rate(d1: int, d2: int, r: int) -> float:
    """Coupled sweep rate 2 r ln(d1 + d2) / sqrt(d1 d2), capped at 1."""
    return min(1.0, 2.0 * r * math.log(d1 + d2) / math.sqrt(d1 * d2))


def trial_seed(seed: int, value_index: int, trial_index: int) -> int:
    """Per-trial seed: mix(mix(seed, "sweep", value_index), "trial", trial_index)."""
    return rng.mix(rng.mix(seed, "sweep", value_index), "trial", trial_index)


def _subspace_metrics(est, ustar, sigma_star) -> dict[str, float]:
    if est.degenerate:
        return {}
    al = align(est.u, ustar)
    return {
        "err_spec": al.err_spec,
        "err_l2inf": al.err_l2inf,
        "err_spec_rel": al.err_spec_rel,
        "err_l2inf_rel": al.err_l2inf_rel,
        "sin_theta": al.sin_theta,
        "spectrum_err": spectrum_error(est.sigma, sigma_star),
    }


def _truth_sigma_from_dense(astar: np.ndarray, r: int) -> np.ndarray:
    """Top-r singular values of a dense truth via its (small) Gram matrix."""
    lam = sym_eig_topr(astar @ astar.T, r).values
    return np.sqrt(np.maximum(lam, 0.0))


def _run_matrix_trial(spec, value, tseed) -> dict[str, dict[str, float]]:
    p = dict(spec.params)
    p[spec.sweep_param] = value
    d1, d2, r = int(p["d1"]), int(p["d2"]), int(p["r"])
    sigma = float(p["sigma"])
    rate = float(p["p"]) if "p" in p else fig1b_sampling_rate(d1, d2, r)
    truth = gen_lowrank_gaussian(d1, d2, r, tseed)
    obs = _sample_dense(truth.astar, rate, NoiseSpec.gaussian(sigma), tseed)
    out = {}
    for method in spec.methods:
        est = (spectral_subspace if method == "diagonal_deleted"
               else vanilla_subspace)(obs, r)
        vals = _subspace_metrics(est, truth.ustar, truth.sigma_star)
        if vals and spec.include_bounds:
            prof = incoherence(truth)
            vals["bound_total"] = bound_general(TheoryInputs(
                mu=prof.mu, kappa=prof.kappa, r=r, d1=d1, d2=d2, p=rate,
                sigma=sigma, sigma_r_star=float(truth.sigma_star[-1]))).total
        out[method] = vals
    return out


def _sample_dense(a: np.ndarray, p: float, noise: NoiseSpec, seed: int) -> ObservationSet:
    """Bernoulli(p) mask plus noise over an arbitrary dense matrix
    (streams "obs.mask" / "obs.noise", matching the truth sampler)."""
    mask = rng.stream(seed, "obs.mask").bernoulli_mask(a.shape, p)
    rows, cols = np.nonzero(mask)
    values = a[rows, cols]
    if noise.kind != "none" and rows.size:
        values = values + noise.draw(rng.stream(seed, "obs.noise"), rows.size)
    return ObservationSet(a.shape[0], a.shape[1], p, rows, cols, values)


def _run_tensor_trial(spec, value, tseed) -> dict[str, dict[str, float]]:
    p = dict(spec.params)
    p[spec.sweep_param] = value
    d, r = int(p["d"]), int(p["r"])
    sigma, rate = float(p["sigma"]), float(p["p"])
    w = rng.stream(tseed, "tensor.factors").normal_matrix(d, r)
    truth = make_tensor_truth(w)
    obs = sample_tensor(truth, rate, NoiseSpec.gaussian(sigma), tseed)
    ustar = tensor_truth_subspace(w)
    sigma_star = _truth_sigma_from_dense(truth.unfolded(), r)
    out = {}
    for method in spec.methods:
        est = (spectral_subspace if method == "diagonal_deleted"
               else vanilla_subspace)(obs, r)
        vals = _subspace_metrics(est, ustar, sigma_star)
        if vals and spec.include_bounds:
            inc = tensor_incoherence(truth)
            vals["bound_total"] = bound_tc(inc.mu_tc, truth.kappa_tc, r, d,
                                           rate, sigma, truth.lambda_min).total
        out[method] = vals
    return out


def _run_cov_trial(spec, value, tseed) -> dict[str, dict[str, float]]:
    p = dict(spec.params)
    p[spec.sweep_param] = value
    d, r, n = int(p["d"]), int(p["r"]), int(p["n"])
    sigma, rate = float(p["sigma"]), float(p["p"])
    truth = gen_factor_truth(d, r, n, tseed)
    x, f = gen_factor_data(truth, sigma, tseed)
    obs = _sample_dense(x, rate, NoiseSpec.none(), tseed)
    sigma_star = _truth_sigma_from_dense(truth.bstar @ f, r)
    out = {}
    for method in spec.methods:
        est = (spectral_subspace if method == "diagonal_deleted"
               else vanilla_subspace)(obs, r)
        vals = _subspace_metrics(est, truth.ustar, sigma_star)
        if vals:
            b = est.u * (est.sigma / np.sqrt(n))
            cov = cov_truth_metrics(b @ b.T, truth.sstar, r)
            vals.update({f"cov_{k}": v for k, v in cov.items()})
            if spec.include_bounds:
                vals["bound_total"] = bound_ce(truth.mu_ce, truth.kappa_ce, r,
                                               d, n, rate, sigma,
                                               float(truth.lam[-1])).total
        out[method] = vals
    return out


def _run_bsbm_trial(spec, value, tseed) -> dict[str, dict[str, float]]:
    p = dict(spec.params)
    p[spec.sweep_param] = value
    nu, nv = int(p["nu"]), int(p["nv"])
    a, b = float(p["a"]), float(p["b"])
    scale = math.log(nu + nv) / math.sqrt(nu * nv)
    qin, qout = min(1.0, a * scale), min(1.0, b * scale)
    inst = gen_bsbm(nu, nv, qin, qout, tseed)
    out = {}
    for method in spec.methods:
        rec = bsbm_recover(inst, method=method)
        if rec.degenerate:
            out[method] = {}
            continue
        ev = bsbm_evaluate(rec.labels, inst.labels_u_true)
        vals = {"exact": 1.0 if ev["exact"] else 0.0,
                "misclass_rate": ev["misclass_rate"]}
        if spec.include_bounds:
            vals["bound_total"] = bound_bsbm(qin, qout, nu, nv)
        out[method] = vals
    return out


_RUNNERS = {
    "matrix": _run_matrix_trial,
    "tensor": _run_tensor_trial,
    "cov": _run_cov_trial,
    "bsbm": _run_bsbm_trial,
}


def _one_trial(spec: ExperimentSpec, value_index: int, trial: int) -> list[TrialRecord]:
    value = spec.sweep[value_index]
    tseed = trial_seed(spec.seed, value_index, trial)
    runner = _RUNNERS[spec.kind.split("_")[0]]
    try:
        per_method = runner(spec, value, tseed)
    except (GramspecError, np.linalg.LinAlgError):
        per_method = {m: {} for m in spec.methods}
    names = metric_names(spec)
    records = []
    for method in spec.methods:
        vals = per_method.get(method, {})
        for metric in names:
            records.append(TrialRecord(
                experiment=spec.kind, param=spec.sweep_param,
                value=float(value), trial=trial, method=method, metric=metric,
                result=float(vals.get(metric, math.nan))))
    return records


def run_experiment(spec: ExperimentSpec, threads: int = 1) -> list[TrialRecord]:
    """Run the full sweep; deterministic in (spec, seed), independent of
    ``threads`` (records are merged in canonical order)."""
    tasks = [(vi, t) for vi in range(len(spec.sweep)) for t in range(spec.trials)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(lambda vt: _one_trial(spec, *vt), tasks))
    else:
        chunks = [_one_trial(spec, vi, t) for vi, t in tasks]
    return [rec for chunk in chunks for rec in chunk]


def summarize(records: list[TrialRecord]) -> list[SummaryRow]:
    """Mean / median / sample std per (value, method, metric), NA excluded."""
    groups: dict[tuple, list[float]] = {}
    nas: dict[tuple, int] = {}
    meta: dict[tuple, str] = {}
    for rec in records:
        key = (rec.value, rec.method, rec.metric)
        meta[key] = rec.param
        if math.isnan(rec.result):
            nas[key] = nas.get(key, 0) + 1
            groups.setdefault(key, [])
        else:
            groups.setdefault(key, []).append(rec.result)
    rows = []
    for key in sorted(groups, key=lambda k: (k[0], k[1], k[2])):
        vals = groups[key]
        if vals:
            mean = statistics.fmean(vals)
            median = statistics.median(vals)
            std = statistics.stdev(vals) if len(vals) > 1 else 0.0
        else:
            mean = median = std = math.nan
        rows.append(SummaryRow(param=meta[key], value=key[0], method=key[1],
                               metric=key[2], mean=mean, median=median,
                               std=std, na_count=nas.get(key, 0)))
    return rows


def _fmt(x) -> str:
    if isinstance(x, float) and math.isnan(x):
        return "NA"
    f = float(x)
    return str(int(f)) if f.is_integer() else repr(f)


def write_records(records: list[TrialRecord], path) -> None:
    """Records CSV with header ``experiment,param,value,trial,method,metric,result``."""
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(CSV_HEADER)
        for r in records:
            w.writerow([r.experiment, r.param, _fmt(r.value), r.trial,
                        r.method, r.metric, _fmt(r.result)])


def read_records(path) -> list[TrialRecord]:
    records = []
    with open(path, newline="") as f:
        rd = csv.reader(f)
        header = next(rd)
        if header != CSV_HEADER:
            raise ConfigInvalid(f"unexpected records header {header!r}")
        for rec in rd:
            result = math.nan if rec[6] == "NA" else float(rec[6])
            records.append(TrialRecord(rec[0], rec[1], float(rec[2]),
                                       int(rec[3]), rec[4], rec[5], result))
    return records


def write_summary(rows: list[SummaryRow], path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["param", "value", "method", "metric", "mean", "median",
                    "std", "na_count"])
        for r in rows:
            w.writerow([r.param, _fmt(r.value), r.method, r.metric,
                        _fmt(r.mean), _fmt(r.median), _fmt(r.std), r.na_count])


def default_threads() -> int:
    """Thread default: GRAMSPEC_THREADS env var, else 1."""
    try:
        return max(1, int(os.environ.get("GRAMSPEC_THREADS", "1")))
    except ValueError:
        return 1
