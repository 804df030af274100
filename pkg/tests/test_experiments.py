import math
import statistics

import numpy as np
import pytest

from surfthresh.decoder import assess_logical_failure, decode_ideal
from surfthresh.experiments import (
    FailureCountRow,
    FailureCountTable,
    SweepRow,
    estimate_failure_ratios,
    find_crossing,
    logical_error_rate,
    run_sweep,
    run_time_to_failure_trial,
    summarize,
    trial_stream,
)
from surfthresh.lattice import CodeSpec, build_lattice
from surfthresh.pauli_noise import ErrorModel, PauliFrame, RngStream, apply_memory_error

T3 = CodeSpec("toric", 3)


def test_p0_zero_is_censored():
    for ex in ("ideal", "circuit"):
        o = run_time_to_failure_trial(T3, ErrorModel(0.0, ex), 1, max_rounds=50)
        assert o.censored and o.rounds == 50 and o.failure_round is None


def test_trial_is_deterministic():
    for ex, p in (("ideal", 0.1), ("circuit", 0.01)):
        model = ErrorModel(p, ex)
        a = run_time_to_failure_trial(T3, model, trial_stream(5, T3, model, 3))
        b = run_time_to_failure_trial(T3, model, trial_stream(5, T3, model, 3))
        assert a == b and not a.censored and a.failure_class


def test_x_tracking_only_reports_x():
    model = ErrorModel(0.15)
    for i in range(30):
        o = run_time_to_failure_trial(T3, model, trial_stream(1, T3, model, i), track="x")
        assert o.failure_class and all(c.startswith("X") for c in o.failure_class)


def test_summarize():
    vals = [3, 5, 8, 1, 2, 9]
    mean, se = summarize(vals)
    assert mean == pytest.approx(statistics.fmean(vals))
    assert se == pytest.approx(statistics.stdev(vals) / math.sqrt(len(vals)))
    assert math.isnan(summarize([4])[1])


def test_ideal_rate_matches_reference_decoder():
    # One round of memory noise decoded by the reference (graph-building)
    # decoder estimates the per-round failure probability; with correction
    # every round, the mean lifetime is its inverse.
    L = build_lattice(T3)
    p0, n = 0.1, 4000
    g = RngStream(23).generator()
    fails = 0
    for _ in range(n):
        f = PauliFrame.zeros(L.n_qubits)
        for q in range(L.n_data):
            apply_memory_error(f, q, p0, g)
        fails += assess_logical_failure(f, decode_ideal(f, L), L).failed
    rate = fails / n
    se_rate = math.sqrt(rate * (1 - rate) / n)
    row = run_sweep("toric", [3], [p0], 4000, seed=2, workers=1).rows[0]
    inv, se_inv = 1 / row.mean_ttf, row.stderr / row.mean_ttf**2
    assert abs(rate - inv) < 4 * math.hypot(se_rate, se_inv)


def test_sweep_rows_and_worker_independence():
    a = run_sweep("surface", [3, 5], [0.1, 0.15], 40, seed=9, workers=1)
    b = run_sweep("surface", [3, 5], [0.1, 0.15], 40, seed=9, workers=2)
    assert a == b
    assert [(r.d, r.p0) for r in a.rows] == [(3, 0.1), (3, 0.15), (5, 0.1), (5, 0.15)]
    assert len(a.for_distance(5)) == 2


def test_sweep_warns_on_censoring():
    with pytest.warns(UserWarning):
        run_sweep("toric", [3], [0.0], 3, seed=1, max_rounds=5, workers=1)


def test_failure_ratio_examples():
    assert estimate_failure_ratios(T3, 1, 100, 0).r_k == 0.0
    row = estimate_failure_ratios(T3, 18, 100, 0)
    assert row.exhaustive and row.samples == 1 and row.r_k in (0.0, 1.0)
    assert row.r_k == estimate_failure_ratios(T3, 18, 100, 99).r_k
    with pytest.raises(ValueError):
        estimate_failure_ratios(T3, 19, 100, 0)


def test_sampled_ratio_is_close_to_exact():
    exact = estimate_failure_ratios(CodeSpec("toric", 5), 3, 10**5, 0)
    assert exact.exhaustive
    est = estimate_failure_ratios(CodeSpec("toric", 5), 3, 4000, 1)
    assert not est.exhaustive
    assert abs(est.r_k - exact.r_k) < 5 * math.sqrt(est.variance) + 1e-12


def _table(r):
    return FailureCountTable("toric", 3, 18, {k: FailureCountRow(k, 1, int(r), True) for k in range(19)})


def test_logical_error_rate_limits():
    assert logical_error_rate(_table(0), 0.1) == 0.0
    assert logical_error_rate(_table(1), 0.1) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        logical_error_rate(_table(0), 1.2)


def _rows(p0s, ttfs, se=0.1):
    return [SweepRow("toric", 3, p, 100, t, se, 0) for p, t in zip(p0s, ttfs)]


def test_crossing():
    grid = [0.1, 0.2, 0.3]
    a = _rows(grid, [10.0, 5.0, 2.0])
    assert not find_crossing(a, a).found
    b = _rows(grid, [20.0, 5.0 * math.e**-0.5, 1.0])
    c = find_crossing(a, b)
    assert c.found and c.bracket == (0.1, 0.2)
    # log difference goes from log(0.5) to 0.5, so the root is at that ratio
    f0, f1 = math.log(0.5), 0.5
    assert c.p0 == pytest.approx(0.1 + 0.1 * -f0 / (f1 - f0))
    assert c.stderr > 0


def test_crossing_with_no_sign_change():
    a = _rows([0.1, 0.2], [10.0, 5.0])
    b = _rows([0.1, 0.2], [20.0, 9.0])
    assert not find_crossing(a, b).found


def test_ideal_model_rejects_faults():
    with pytest.raises(ValueError):
        run_time_to_failure_trial(T3, ErrorModel(0.1), 1, faults=np.zeros((1, 6), np.int64))
