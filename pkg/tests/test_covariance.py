import numpy as np
import pytest

from gramspec.apps.covariance import (FactorModelTruth, cov_estimate,
                                      cov_truth_metrics, factor_truth_from_loading,
                                      gen_factor_data, gen_factor_samples,
                                      gen_factor_truth)
from gramspec.errors import InvalidParameter, ShapeMismatch
from gramspec.harness import _sample_dense
from gramspec.linalg import spectral_norm
from gramspec.model import NoiseSpec

from oracles import random_orthonormal


def test_degenerate_noise_keeps_unloaded_rows_zero():
    truth = factor_truth_from_loading(np.array([[1.0], [0.0]]), n=20)
    x = gen_factor_samples(truth, 0.0, seed=3)
    assert x.shape == (2, 20)
    np.testing.assert_array_equal(x[1], np.zeros(20))


def test_pure_noise_variance():
    # zero loading: X is noise alone; check its empirical variance
    d, n, sigma = 2, 10_000, 0.8
    truth = FactorModelTruth(d=d, r=1, n=n, bstar=np.zeros((d, 1)),
                             sstar=np.zeros((d, d)), ustar=np.eye(d)[:, :1],
                             lam=np.zeros(1))
    x = gen_factor_samples(truth, sigma, seed=5)
    mean_sq = float(np.mean(x**2))
    se = sigma**2 * np.sqrt(2.0 / (d * n))
    assert abs(mean_sq - sigma**2) <= 5.0 * se


def test_sampling_deterministic():
    truth = gen_factor_truth(10, 2, 50, seed=9)
    a = gen_factor_samples(truth, 0.5, seed=11)
    b, f = gen_factor_data(truth, 0.5, seed=11)
    np.testing.assert_array_equal(a, b)
    assert f.shape == (2, 50)


def test_gen_factor_truth_diagnostics():
    truth = gen_factor_truth(40, 3, 100, seed=13)
    assert truth.kappa_ce >= 1.0
    assert truth.mu_ce >= 1.0 - 1e-12
    np.testing.assert_allclose(truth.sstar, truth.bstar @ truth.bstar.T, atol=1e-12)
    np.testing.assert_allclose(
        truth.ustar @ np.diag(truth.lam) @ truth.ustar.T, truth.sstar, atol=1e-8)
    with pytest.raises(InvalidParameter):
        gen_factor_truth(4, 5, 10, seed=0)
    with pytest.raises(InvalidParameter):
        gen_factor_samples(truth, -1.0, seed=0)


def test_covariance_formula_hand_example():
    # U = e1 (d = 2), Sigma = (2), n = 4  ->  B = (1, 0)^T, S = [[1, 0], [0, 0]]
    u = np.array([[1.0], [0.0]])
    sigma = np.array([2.0])
    b = u * (sigma / np.sqrt(4))
    np.testing.assert_array_equal(b, [[1.0], [0.0]])
    np.testing.assert_array_equal(b @ b.T, [[1.0, 0.0], [0.0, 0.0]])


def test_cov_estimate_is_psd_low_rank():
    truth = gen_factor_truth(30, 2, 400, seed=17)
    x = gen_factor_samples(truth, 0.5, seed=17)
    obs = _sample_dense(x, 0.5, NoiseSpec.none(), seed=17)
    est, s = cov_estimate(obs, 2, 400)
    np.testing.assert_allclose(s, s.T, atol=1e-14)
    evals = np.linalg.eigvalsh(s)
    assert np.all(evals >= -1e-10 * max(1.0, evals[-1]))
    assert np.sum(evals > 1e-10 * max(1.0, evals[-1])) <= 2
    assert est.u.shape == (30, 2)


def test_cov_estimate_tracks_truth():
    truth = gen_factor_truth(30, 2, 2000, seed=19)
    x = gen_factor_samples(truth, 0.3, seed=19)
    obs = _sample_dense(x, 0.6, NoiseSpec.none(), seed=19)
    _, s = cov_estimate(obs, 2, 2000)
    rel = cov_truth_metrics(s, truth.sstar, 2)["op_rel"]
    assert rel <= 0.5


def test_cov_truth_metrics_examples():
    sstar = random_orthonormal(5, 5, seed=21)
    sstar = sstar @ np.diag([5.0, 4.0, 3.0, 2.0, 1.0]) @ sstar.T
    zero = cov_truth_metrics(sstar, sstar, 5)
    assert zero["op_err"] == 0.0 and zero["inf_err"] == 0.0
    eps = 0.25
    bumped = sstar + eps * np.outer(np.eye(5)[0], np.eye(5)[0])
    vals = cov_truth_metrics(bumped, sstar, 5)
    assert abs(vals["op_err"] - eps) <= 1e-12
    assert abs(vals["inf_err"] - eps) <= 1e-12
    # op_err agrees with an svd-based oracle on a random PSD pair
    g = np.random.default_rng(23)
    m1, m2 = g.standard_normal((6, 3)), g.standard_normal((6, 3))
    s1, s2 = m1 @ m1.T, m2 @ m2.T
    ref = float(np.max(np.linalg.svd(s1 - s2, compute_uv=False)))
    assert abs(cov_truth_metrics(s1, s2, 6)["op_err"] - ref) <= 1e-10
    with pytest.raises(ShapeMismatch):
        cov_truth_metrics(s1, np.eye(4), 2)


def test_cov_relative_normalizers():
    truth = gen_factor_truth(25, 3, 100, seed=29)
    bump = truth.sstar + 0.1 * np.eye(25)
    vals = cov_truth_metrics(bump, truth.sstar, 3)
    assert abs(vals["op_rel"] - vals["op_err"] / spectral_norm(truth.sstar)) <= 1e-14
    expected_scale = truth.lam[0] * truth.mu_ce * 3 / 25
    assert abs(vals["inf_rel"] - vals["inf_err"] / expected_scale) <= 1e-10
