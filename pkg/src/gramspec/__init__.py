"""Column-subspace estimation from noisy, incomplete, unbalanced low-rank
matrices via the diagonal-deleted Gram spectral method, plus adapters for
tensor completion, covariance estimation with missing data, and bipartite
community recovery, error metrics with optimal alignment, theory-bound
evaluators, and a reproducible Monte Carlo experiment harness."""

from . import apps, estimator, harness, linalg, metrics, model, rng
from .errors import (ConfigInvalid, GramspecError, IndexOutOfRange,
                     InvalidParameter, InvalidProbability, NoConvergence,
                     NonSymmetric, RankDeficient, RankTooLarge, ShapeMismatch)
from .estimator import (GramMatrix, LeaveOutDiagnostics, SubspaceEstimate,
                        gram_offdiag, loo2_subspace, loo_observation,
                        loo_subspace, spectral_subspace, vanilla_subspace)
from .harness import ExperimentSpec, TrialRecord, run_experiment, summarize
from .linalg import EigenResult, polar_sign, svd, sym_eig_topr
from .metrics import (AlignmentResult, BoundBreakdown, TheoryInputs, align,
                      bound_bsbm, bound_ce, bound_general, bound_tc,
                      check_conditions, spectrum_error)
from .model import (IncoherenceProfile, LowRankTruth, NoiseSpec,
                    ObservationSet, gen_lowrank_gaussian, incoherence,
                    sample_observations, zero_fill)

__version__ = "0.1.0"

__all__ = [
    "apps", "estimator", "harness", "linalg", "metrics", "model", "rng",
    "ConfigInvalid", "GramspecError", "IndexOutOfRange", "InvalidParameter",
    "InvalidProbability", "NoConvergence", "NonSymmetric", "RankDeficient",
    "RankTooLarge", "ShapeMismatch",
    "GramMatrix", "LeaveOutDiagnostics", "SubspaceEstimate", "gram_offdiag",
    "loo2_subspace", "loo_observation", "loo_subspace", "spectral_subspace",
    "vanilla_subspace",
    "ExperimentSpec", "TrialRecord", "run_experiment", "summarize",
    "EigenResult", "polar_sign", "svd", "sym_eig_topr",
    "AlignmentResult", "BoundBreakdown", "TheoryInputs", "align",
    "bound_bsbm", "bound_ce", "bound_general", "bound_tc",
    "check_conditions", "spectrum_error",
    "IncoherenceProfile", "LowRankTruth", "NoiseSpec", "ObservationSet",
    "gen_lowrank_gaussian", "incoherence", "sample_observations", "zero_fill",
    "__version__",
]
