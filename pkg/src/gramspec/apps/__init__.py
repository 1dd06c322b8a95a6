"""Application adapters reducing domain problems to the core estimator."""

from .bsbm import (BsbmInstance, RecoveryResult, bsbm_evaluate, bsbm_recover,
                   gen_bsbm, load_bsbm, save_bsbm)
from .covariance import (FactorModelTruth, cov_estimate, cov_truth_metrics,
                         gen_factor_data, gen_factor_samples, gen_factor_truth)
from .tensor import (TensorIncoherence, TensorTruth, load_tensor_observations,
                     make_tensor_truth, mode1_refold, mode1_unfold,
                     sample_tensor, save_tensor_observations,
                     tensor_incoherence, tensor_pipeline,
                     tensor_truth_subspace)

__all__ = [
    "BsbmInstance", "RecoveryResult", "bsbm_evaluate", "bsbm_recover",
    "gen_bsbm", "load_bsbm", "save_bsbm",
    "FactorModelTruth", "cov_estimate", "cov_truth_metrics",
    "gen_factor_data", "gen_factor_samples", "gen_factor_truth",
    "TensorIncoherence", "TensorTruth", "load_tensor_observations",
    "make_tensor_truth", "mode1_refold", "mode1_unfold", "sample_tensor",
    "save_tensor_observations", "tensor_incoherence", "tensor_pipeline",
    "tensor_truth_subspace",
]
