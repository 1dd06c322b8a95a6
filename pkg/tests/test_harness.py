import json
import math

import numpy as np
import pytest

from gramspec.errors import ConfigInvalid
from gramspec.harness import (ExperimentSpec, TrialRecord, fig1b_sampling_rate,
                              metric_names, read_records, run_experiment,
                              summarize, write_records, write_summary)


def small_spec(**overrides):
    base = dict(kind="matrix_sweep_p",
                params={"d1": 12, "d2": 40, "r": 2, "sigma": 0.3},
                sweep=(0.4, 0.8), trials=2, seed=99,
                methods=("diagonal_deleted",))
    base.update(overrides)
    return ExperimentSpec(**base)


def test_single_trial_record_count():
    spec = small_spec(sweep=(0.5,), trials=1)
    records = run_experiment(spec)
    assert len(records) == 6
    assert [r.metric for r in records] == list(metric_names(spec))
    assert all(not math.isnan(r.result) for r in records)


def test_record_stream_shape_and_order():
    spec = small_spec(methods=("diagonal_deleted", "vanilla"), trials=3)
    records = run_experiment(spec)
    n_metrics = len(metric_names(spec))
    assert len(records) == 2 * 3 * 2 * n_metrics
    for value in spec.sweep:
        hits = [r for r in records if r.value == value]
        assert len(hits) == 3 * 2 * n_metrics
    # canonical order: value, trial, method, metric
    keys = [(r.value, r.trial, spec.methods.index(r.method)) for r in records]
    assert keys == sorted(keys)


def test_runs_deterministic_and_thread_independent():
    spec = small_spec(methods=("diagonal_deleted", "vanilla"))
    a = run_experiment(spec, threads=1)
    b = run_experiment(spec, threads=2)
    assert a == b


def test_include_bounds_adds_metric():
    spec = small_spec(include_bounds=True, sweep=(0.5,), trials=1)
    records = run_experiment(spec)
    assert len(records) == 7
    bound = [r for r in records if r.metric == "bound_total"]
    assert len(bound) == 1 and bound[0].result > 0.0


def test_fig1b_coupling_per_point():
    # a d2 sweep without explicit p must reproduce a p sweep pinned at the
    # coupled rate for the same (seed, value index, trial)
    d2 = 64
    coupled = fig1b_sampling_rate(12, d2, 2)
    sweep_d2 = ExperimentSpec(kind="matrix_sweep_d2",
                              params={"d1": 12, "r": 2, "sigma": 0.3},
                              sweep=(d2,), trials=1, seed=5,
                              methods=("diagonal_deleted",))
    pinned = ExperimentSpec(kind="matrix_sweep_p",
                            params={"d1": 12, "d2": d2, "r": 2, "sigma": 0.3},
                            sweep=(coupled,), trials=1, seed=5,
                            methods=("diagonal_deleted",))
    res_a = {r.metric: r.result for r in run_experiment(sweep_d2)}
    res_b = {r.metric: r.result for r in run_experiment(pinned)}
    assert res_a == res_b


def test_matrix_sweep_d2_accepts_fixed_p():
    spec = ExperimentSpec(kind="matrix_sweep_d2",
                          params={"d1": 12, "r": 2, "sigma": 0.3, "p": 0.9},
                          sweep=(30, 60), trials=1, seed=6,
                          methods=("diagonal_deleted",))
    assert all(not math.isnan(r.result) for r in run_experiment(spec))


def test_failed_trials_record_na():
    spec = ExperimentSpec(kind="bsbm_sweep_a",
                          params={"nu": 4, "nv": 6, "b": 0.5},
                          sweep=(0.1,),  # a < b -> qin < qout -> trial fails
                          trials=2, seed=7, methods=("diagonal_deleted",))
    records = run_experiment(spec)
    assert len(records) == 2 * len(metric_names(spec))
    assert all(math.isnan(r.result) for r in records)
    rows = summarize(records)
    assert all(row.na_count == 2 and math.isnan(row.mean) for row in rows)


def test_bsbm_sweep_runs():
    spec = ExperimentSpec(kind="bsbm_sweep_nv",
                          params={"nu": 8, "a": 4.0, "b": 0.1},
                          sweep=(40, 80), trials=2, seed=8,
                          methods=("diagonal_deleted", "vanilla"))
    records = run_experiment(spec)
    exact = [r.result for r in records if r.metric == "exact"]
    assert set(exact) <= {0.0, 1.0}


def test_cov_and_tensor_sweeps_run():
    cov = ExperimentSpec(kind="cov_sweep_sigma",
                         params={"d": 10, "r": 2, "n": 60, "p": 0.8},
                         sweep=(0.1, 0.5), trials=1, seed=9,
                         methods=("diagonal_deleted",))
    recs = run_experiment(cov)
    assert len(recs) == 2 * len(metric_names(cov))
    tens = ExperimentSpec(kind="tensor_sweep_sigma",
                          params={"d": 8, "r": 1, "p": 0.9},
                          sweep=(0.0, 0.2), trials=1, seed=10,
                          methods=("diagonal_deleted",))
    recs = run_experiment(tens)
    assert all(not math.isnan(r.result) for r in recs)


def test_summarize_examples():
    def rec(value, result, trial):
        return TrialRecord("matrix_sweep_p", "p", value, trial,
                           "diagonal_deleted", "err_spec", result)

    single = summarize([rec(0.5, 2.5, 0)])
    assert single[0].mean == 2.5 and single[0].median == 2.5
    assert single[0].std == 0.0 and single[0].na_count == 0

    two = summarize([rec(0.5, 1.0, 0), rec(0.5, 3.0, 1)])
    assert two[0].mean == 2.0 and two[0].median == 2.0
    assert abs(two[0].std - math.sqrt(2.0)) <= 1e-12

    with_na = summarize([rec(0.5, 1.0, 0), rec(0.5, math.nan, 1),
                         rec(0.5, 2.0, 2)])
    assert with_na[0].mean == 1.5 and with_na[0].na_count == 1


def test_spec_validation_errors():
    with pytest.raises(ConfigInvalid):
        small_spec(kind="matrix_sweep_q")
    with pytest.raises(ConfigInvalid):
        small_spec(sweep=(0.5, 0.5))
    with pytest.raises(ConfigInvalid):
        small_spec(sweep=())
    with pytest.raises(ConfigInvalid):
        small_spec(trials=0)
    with pytest.raises(ConfigInvalid):
        small_spec(methods=("nope",))
    with pytest.raises(ConfigInvalid):
        ExperimentSpec(kind="matrix_sweep_p", params={"d1": 4},
                       sweep=(0.5,), trials=1, seed=0)
    with pytest.raises(ConfigInvalid):
        small_spec(params={"d1": 12, "d2": 40, "r": 2, "sigma": 0.3, "bogus": 1})
    with pytest.raises(ConfigInvalid):
        ExperimentSpec(kind="cov_sweep_n",
                       params={"d": 10, "r": 2, "sigma": 0.1, "p": 0.5},
                       sweep=(10.5, 20.0), trials=1, seed=0)


def test_spec_from_file(tmp_path):
    payload = {"kind": "matrix_sweep_p",
               "params": {"d1": 12, "d2": 40, "r": 2, "sigma": 0.3},
               "sweep": [0.4, 0.8], "trials": 2, "seed": 99,
               "methods": ["diagonal_deleted"]}
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(payload))
    spec = ExperimentSpec.from_file(path)
    assert spec == small_spec()
    path.write_text("{not json")
    with pytest.raises(ConfigInvalid):
        ExperimentSpec.from_file(path)


def test_records_csv_roundtrip(tmp_path):
    spec = small_spec(trials=1, methods=("diagonal_deleted", "vanilla"))
    records = run_experiment(spec)
    # poke an NA in to exercise that path
    records[3] = TrialRecord(records[3].experiment, records[3].param,
                             records[3].value, records[3].trial,
                             records[3].method, records[3].metric, math.nan)
    path = tmp_path / "records.csv"
    write_records(records, path)
    header = path.read_text().splitlines()[0]
    assert header == "experiment,param,value,trial,method,metric,result"
    back = read_records(path)
    assert len(back) == len(records)
    for a, b in zip(back, records):
        assert (a.experiment, a.param, a.value, a.trial, a.method, a.metric) \
            == (b.experiment, b.param, b.value, b.trial, b.method, b.metric)
        assert (math.isnan(a.result) and math.isnan(b.result)) or a.result == b.result


def test_csv_bodies_byte_identical_across_threads(tmp_path):
    spec = small_spec(methods=("diagonal_deleted", "vanilla"))
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    write_records(run_experiment(spec, threads=1), p1)
    write_records(run_experiment(spec, threads=2), p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_write_summary(tmp_path):
    spec = small_spec()
    rows = summarize(run_experiment(spec))
    path = tmp_path / "summary.csv"
    write_summary(rows, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "param,value,method,metric,mean,median,std,na_count"
    assert len(lines) == 1 + len(rows)
