"""Command-line entry points.

Subcommands: ``estimate`` (run the estimator on observation files),
``tensor`` / ``cov`` / ``bsbm`` (seeded single-shot adapter runs),
``experiment`` (full sweep from a JSON spec to a records CSV), and
``bounds`` (evaluate the guarantee formulas from flags).  Exit codes:
0 success, 1 runtime error, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import harness, metrics, model, rng
from .apps import bsbm as bsbm_app
from .apps import covariance as cov_app
from .apps import tensor as tensor_app
from .errors import GramspecError
from .estimator import spectral_subspace, vanilla_subspace
from .model import NoiseSpec


def _common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="64-bit RNG seed")
    p.add_argument("--trials", type=int, default=None,
                   help="override the trial count")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: GRAMSPEC_THREADS or 1)")


def _estimator_for(name: str):
    return spectral_subspace if name == "diagonal_deleted" else vanilla_subspace


def _print_estimate(est) -> None:
    print("sigma: " + " ".join(repr(float(s)) for s in est.sigma))
    print("lambda_raw: " + " ".join(repr(float(v)) for v in est.lambda_raw))
    print(f"clamped: {est.clamped}")
    print(f"degenerate: {est.degenerate}")
    print("U:")
    for row in est.u:
        print(" ".join(repr(float(x)) for x in row))


def _cmd_estimate(args) -> int:
    obs = model.load_observations(args.data, args.meta)
    if args.estimate_p:
        obs = obs.with_estimated_p()
    est = _estimator_for(args.method)(obs, args.rank)
    _print_estimate(est)
    return 0


def _cmd_tensor(args) -> int:
    if args.data:
        obs = tensor_app.load_tensor_observations(args.data, args.meta)
        est = _estimator_for(args.method)(obs, args.rank)
        _print_estimate(est)
        return 0
    w = rng.stream(args.seed, "tensor.factors").normal_matrix(args.d, args.rank)
    est, alignment, inc = tensor_app.tensor_pipeline(
        w, args.p, NoiseSpec.gaussian(args.sigma), args.seed, args.rank)
    print(f"err_spec: {alignment.err_spec!r}")
    print(f"err_spec_rel: {alignment.err_spec_rel!r}")
    print(f"err_l2inf: {alignment.err_l2inf!r}")
    print(f"sin_theta: {alignment.sin_theta!r}")
    print(f"mu_tc: {inc.mu_tc!r}  mu3: {inc.mu3!r}  mu4: {inc.mu4!r}  mu5: {inc.mu5!r}")
    print(f"degenerate: {est.degenerate}")
    return 0


def _cmd_cov(args) -> int:
    truth = cov_app.gen_factor_truth(args.d, args.rank, args.n, args.seed)
    x = cov_app.gen_factor_samples(truth, args.sigma, args.seed)
    obs = harness._sample_dense(x, args.p, NoiseSpec.none(), args.seed)
    est, s = cov_app.cov_estimate(obs, args.rank, args.n)
    vals = cov_app.cov_truth_metrics(s, truth.sstar, args.rank)
    al = metrics.align(est.u, truth.ustar)
    print(f"err_spec_rel: {al.err_spec_rel!r}")
    print(f"cov_op_rel: {vals['op_rel']!r}")
    print(f"cov_inf_rel: {vals['inf_rel']!r}")
    print(f"degenerate: {est.degenerate}")
    return 0


def _cmd_bsbm(args) -> int:
    if args.data:
        inst = bsbm_app.load_bsbm(args.data, args.meta)
    else:
        inst = bsbm_app.gen_bsbm(args.nu, args.nv, args.qin, args.qout, args.seed)
    rec = bsbm_app.bsbm_recover(inst, method=args.method,
                                estimate_center=args.estimate_center)
    ev = bsbm_app.bsbm_evaluate(rec.labels, inst.labels_u_true)
    print(f"exact: {ev['exact']}")
    print(f"misclass_rate: {ev['misclass_rate']!r}")
    print(f"degenerate: {rec.degenerate}  ties: {rec.ties}")
    print("labels: " + " ".join(str(int(x)) for x in rec.labels))
    return 0


def _cmd_experiment(args) -> int:
    spec = harness.ExperimentSpec.from_file(args.spec)
    overrides = {}
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.seed_given:
        overrides["seed"] = args.seed
    if overrides:
        spec = harness.ExperimentSpec(
            kind=spec.kind, params=spec.params, sweep=spec.sweep,
            trials=overrides.get("trials", spec.trials),
            seed=overrides.get("seed", spec.seed),
            methods=spec.methods, include_bounds=spec.include_bounds)
    threads = args.threads if args.threads else harness.default_threads()
    records = harness.run_experiment(spec, threads=threads)
    harness.write_records(records, args.out)
    if args.summary_out:
        harness.write_summary(harness.summarize(records), args.summary_out)
    return 0


def _print_breakdown(b) -> None:
    print(f"missing_data: {b.missing_data!r}")
    print(f"noise: {b.noise!r}")
    print(f"diag_deletion: {b.diag_deletion!r}")
    print(f"total: {b.total!r}")


def _cmd_bounds(args) -> int:
    if args.general:
        b = metrics.bound_general(metrics.TheoryInputs(
            mu=args.mu, kappa=args.kappa, r=args.r, d1=args.d1, d2=args.d2,
            p=args.p, sigma=args.sigma, sigma_r_star=args.sigma_r),
            drop_sampling_terms_at_p1=args.drop_sampling_terms)
        _print_breakdown(b)
    elif args.tc:
        _print_breakdown(metrics.bound_tc(args.mu_tc, args.kappa_tc, args.r,
                                          args.d, args.p, args.sigma,
                                          args.lambda_min))
    elif args.ce:
        _print_breakdown(metrics.bound_ce(args.mu_ce, args.kappa_ce, args.r,
                                          args.d, args.n, args.p, args.sigma,
                                          args.lambda_r))
    elif args.bsbm:
        print(f"total: {metrics.bound_bsbm(args.qin, args.qout, args.nu, args.nv)!r}")
    else:
        raise GramspecError("choose one of --general, --tc, --ce, --bsbm")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gramspec",
                                 description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="estimate U / Sigma from observation files")
    p.add_argument("--data", required=True, help="entries CSV (i,j,value)")
    p.add_argument("--meta", required=True, help="sidecar JSON {d1, d2, p}")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--method", choices=harness.METHODS, default="diagonal_deleted")
    p.add_argument("--estimate-p", action="store_true",
                   help="replace p by |Omega| / (d1 d2)")
    _common_flags(p)
    p.set_defaults(fn=_cmd_estimate)

    p = sub.add_parser("tensor", help="single-shot tensor completion run")
    p.add_argument("--data", help="tensor entries CSV (i,j,k,value)")
    p.add_argument("--meta", help="sidecar JSON {d, p}")
    p.add_argument("--d", type=int, default=30)
    p.add_argument("--rank", type=int, default=2)
    p.add_argument("--p", type=float, default=0.2)
    p.add_argument("--sigma", type=float, default=0.0)
    p.add_argument("--method", choices=harness.METHODS, default="diagonal_deleted")
    _common_flags(p)
    p.set_defaults(fn=_cmd_tensor)

    p = sub.add_parser("cov", help="single-shot covariance estimation run")
    p.add_argument("--d", type=int, default=50)
    p.add_argument("--rank", type=int, default=2)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--p", type=float, default=0.2)
    p.add_argument("--sigma", type=float, default=0.0)
    _common_flags(p)
    p.set_defaults(fn=_cmd_cov)

    p = sub.add_parser("bsbm", help="single-shot bipartite community recovery")
    p.add_argument("--data", help="edge list CSV (i,j)")
    p.add_argument("--meta", help="sidecar JSON {nu, nv, qin, qout}")
    p.add_argument("--nu", type=int, default=50)
    p.add_argument("--nv", type=int, default=500)
    p.add_argument("--qin", type=float, default=0.3)
    p.add_argument("--qout", type=float, default=0.05)
    p.add_argument("--method", choices=harness.METHODS, default="diagonal_deleted")
    p.add_argument("--estimate-center", action="store_true",
                   help="center at the empirical edge density instead of (qin+qout)/2")
    _common_flags(p)
    p.set_defaults(fn=_cmd_bsbm)

    p = sub.add_parser("experiment", help="run a sweep from a JSON spec")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True, help="records CSV output path")
    p.add_argument("--summary-out", help="optional summary CSV output path")
    _common_flags(p)
    p.set_defaults(fn=_cmd_experiment)

    p = sub.add_parser("bounds", help="evaluate guarantee formulas")
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--general", action="store_true")
    which.add_argument("--tc", action="store_true")
    which.add_argument("--ce", action="store_true")
    which.add_argument("--bsbm", action="store_true")
    p.add_argument("--mu", type=float), p.add_argument("--kappa", type=float)
    p.add_argument("--r", type=int), p.add_argument("--d1", type=int)
    p.add_argument("--d2", type=int), p.add_argument("--p", type=float)
    p.add_argument("--sigma", type=float, default=0.0)
    p.add_argument("--sigma-r", type=float)
    p.add_argument("--drop-sampling-terms", action="store_true")
    p.add_argument("--mu-tc", type=float), p.add_argument("--kappa-tc", type=float)
    p.add_argument("--d", type=int), p.add_argument("--lambda-min", type=float)
    p.add_argument("--mu-ce", type=float), p.add_argument("--kappa-ce", type=float)
    p.add_argument("--n", type=int), p.add_argument("--lambda-r", type=float)
    p.add_argument("--qin", type=float), p.add_argument("--qout", type=float)
    p.add_argument("--nu", type=int), p.add_argument("--nv", type=int)
    _common_flags(p)
    p.set_defaults(fn=_cmd_bounds)
    return ap


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    ap = build_parser()
    args = ap.parse_args(argv)
    args.seed_given = any(a == "--seed" or a.startswith("--seed=") for a in argv)
    try:
        return args.fn(args)
    except (GramspecError, OSError, np.linalg.LinAlgError, TypeError) as e:
        print(f"gramspec: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
