import math

import numpy as np
import pytest

from partial_oracle.errors import CapacityError
from partial_oracle.scrambler import make_spec
from partial_oracle.search import (
    SearchRun,
    band_counts,
    band_of,
    run_baseline,
    run_search,
    stage_step,
    trial,
)


def test_stage_one_schedule():
    spec = make_spec(8, 0)
    run = SearchRun(spec, 500, np.random.default_rng(0))
    report = stage_step(run, 1)
    assert report.lambda_hat == 0.5
    assert report.g == 1 and report.circuit_queries == 1
    assert report.alpha == pytest.approx(math.pi / 2, abs=1e-12)
    assert report.exact_target_prob == pytest.approx(1.0, abs=1e-9)
    assert report.entropy_before == 8


def test_exact_models_entropy_trace():
    n = 7
    spec = make_spec(n, 2)
    run = SearchRun(spec, 50, np.random.default_rng(0), exact_models=True)
    for ell in range(1, n + 1):
        report = stage_step(run, ell)
        assert report.entropy_before == pytest.approx(n - (ell - 1), abs=1e-12)
        assert report.lambda_hat == pytest.approx(0.5, abs=1e-12)
        assert report.lambda_true == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("n", [3, 6, 10])
def test_exact_models_reach_key(n):
    spec = make_spec(n, n + 100)
    result = run_search(spec, 10, np.random.default_rng(1), exact_models=True)
    assert result.success_prob == pytest.approx(1.0, abs=1e-9)
    assert result.verified and result.found_key == spec.x_star
    assert result.total_circuit_queries == n
    probs = [s.exact_target_prob for s in result.stages]
    assert all(p >= 1 - 1e-9 for p in probs)


def test_search_accounting():
    spec = make_spec(8, 5)
    result = run_search(spec, 300, np.random.default_rng(3))
    assert result.total_circuit_queries == sum(s.circuit_queries for s in result.stages)
    assert all(s.circuit_queries == s.g for s in result.stages)
    assert result.total_shot_queries == 300 * result.total_circuit_queries
    assert len(result.stages) == 8
    assert result.verified == (result.found_key == spec.x_star)
    assert 0 <= result.success_prob <= 1


def test_search_typical_n8():
    spec = make_spec(8, 17)
    result = run_search(spec, 1000, np.random.default_rng(17))
    assert result.verified
    assert result.success_prob > 0.9


def test_search_reproducible():
    spec = make_spec(9, 4)
    a = run_search(spec, 200, np.random.default_rng(8))
    b = run_search(spec, 200, np.random.default_rng(8))
    assert a.to_record() == b.to_record()


def test_two_bits_per_stage():
    spec = make_spec(8, 3)
    result = run_search(spec, 1000, np.random.default_rng(0), bits_per_stage=2, exact_models=True)
    assert len(result.stages) == 4
    assert [s.flag_bits for s in result.stages] == [2, 4, 6, 8]
    assert all(s.lambda_hat == pytest.approx(0.25) for s in result.stages)
    assert result.total_circuit_queries == 4
    assert result.success_prob == pytest.approx(1.0, abs=1e-9)


def test_two_bits_per_stage_odd_n():
    spec = make_spec(7, 3)
    result = run_search(spec, 100, np.random.default_rng(0), bits_per_stage=2, exact_models=True)
    assert [s.flag_bits for s in result.stages] == [2, 4, 6, 7]
    assert result.success_prob == pytest.approx(1.0, abs=1e-9)


def test_bad_run_parameters():
    spec = make_spec(4, 0)
    with pytest.raises(ValueError):
        run_search(spec, 0, np.random.default_rng(0))
    with pytest.raises(ValueError):
        run_search(spec, 10, np.random.default_rng(0), bits_per_stage=3)
    with pytest.raises(ValueError):
        run_search(spec, 10, np.random.default_rng(0), entropy_source="nope")


@pytest.mark.parametrize("n, g", [(4, 3), (8, 13), (10, 25), (12, 50), (14, 101)])
def test_baseline_iterations(n, g):
    result = run_baseline(make_spec(n, 1))
    assert result.total_circuit_queries == g
    assert result.success_prob == pytest.approx(1.0, abs=1e-9)
    assert result.verified


@pytest.mark.parametrize("n", [4, 8, 12])
def test_baseline_fixed_point(n):
    spec = make_spec(n, 99)
    result = run_baseline(spec)
    assert result.success_prob == pytest.approx(1.0, abs=1e-9)
    assert result.found_key == spec.x_star


def test_baseline_capacity():
    with pytest.raises(CapacityError):
        run_baseline(make_spec(25, 0))


def test_trial_rep_seeds_are_order_independent():
    a = [trial(6, 100, 7, rep=r)[1].to_record() for r in range(4)]
    b = [trial(6, 100, 7, rep=r)[1].to_record() for r in reversed(range(4))][::-1]
    assert a == b


@pytest.mark.parametrize(
    "p, band",
    [(0.3, "<0.50"), (0.5, "0.50-0.59"), (0.599, "0.50-0.59"), (0.85, "0.80-0.89"),
     (0.9, "0.90-0.99"), (0.99, "0.90-0.99"), (0.9901, ">0.99"), (1.0, ">0.99")],
)
def test_band_of(p, band):
    assert band_of(p) == band


def test_band_counts_partition(rng):
    probs = rng.uniform(0.4, 1.0, 50)
    counts = band_counts(probs)
    assert sum(counts.values()) == 50


def test_report_record_schema():
    spec = make_spec(5, 0)
    rec = run_search(spec, 50, np.random.default_rng(0)).to_record()
    assert rec["bit_order"] == "msb_first_display"
    assert set(rec) >= {"found_key", "verified", "success_prob", "total_circuit_queries",
                        "total_shot_queries", "stages"}
    assert len(rec["found_key"]) == 5
    assert set(rec["stages"][0]) >= {"ell", "lambda_hat", "g", "alpha", "circuit_queries",
                                     "entropy_before", "exact_target_prob", "betas_after"}
