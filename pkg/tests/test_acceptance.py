"""
Acceptance gate.  Every criterion prints one PASS/FAIL line (visible without -s)
and then asserts, so a failing criterion also fails the pytest run.
"""
import json
import math
import time

import mpmath
import numpy as np
import pytest

from partial_oracle import qsim
from partial_oracle.cli import ExperimentConfig, main, render_sweep_csv, sweep_rows
from partial_oracle.grover_long import analytic_2d, run_stage, schedule_for
from partial_oracle.oracle import mask_oracle
from partial_oracle.scrambler import enumerate_target_set, make_spec, stage_mask
from partial_oracle.search import run_baseline, trial
from partial_oracle.state_model import (
    ModelledState,
    entropy,
    estimate_from_counts,
    estimate_lambda,
    exact_model,
    model_from_probabilities,
    prepare,
    uniform_model,
)
from partial_oracle.verify import oracle_deviation, random_state


@pytest.fixture
def report(capsys):
    start = time.perf_counter()

    def emit(label, passed, detail):
        with capsys.disabled():
            elapsed = time.perf_counter() - start
            print(f"\n{'PASS' if passed else 'FAIL'} {label}: {detail} [{elapsed:.2f}s]")
        assert passed, detail

    return emit


def mp_schedule(lam):
    with mpmath.workdps(60):
        lam = mpmath.mpf(lam)
        if lam >= mpmath.mpf("0.999"):
            return 0, math.pi
        g = int(mpmath.ceil(mpmath.pi / (4 * mpmath.asin(mpmath.sqrt(lam))) - mpmath.mpf(1) / 2))
        arg = min(mpmath.mpf(1), mpmath.sin(mpmath.pi / (4 * g + 2)) / mpmath.sqrt(lam))
        return g, float(2 * mpmath.asin(arg))


def test_criterion_1_schedule(report):
    expected = {1.0: 0, 0.5: 1, 0.25: 1, 1 / 16: 3, 2.0 ** -14: 101}
    alphas = {0.5: math.pi / 2, 0.25: math.pi}
    worst = 0.0
    ok = True
    for lam, g in expected.items():
        sched = schedule_for(lam)
        ref_g, ref_alpha = mp_schedule(lam)
        ok &= sched.g == g == ref_g
        worst = max(worst, abs(sched.alpha - ref_alpha))
        if lam in alphas:
            worst = max(worst, abs(sched.alpha - alphas[lam]))
    ok &= worst < 1e-12
    report("criterion 1 schedule values", ok, f"g exact, worst alpha deviation {worst:.2e}")


def test_criterion_2_fixed_point(report):
    lams = (0.5, 0.25, 0.1, 0.01, 2.0 ** -14)
    n = 10
    worst_2d = worst_sv = 0.0
    for lam in lams:
        sched = schedule_for(lam)
        _, b = analytic_2d(lam, sched.alpha, sched.g)
        worst_2d = max(worst_2d, abs(1 - abs(b) ** 2))
        # bit 1 carries weight lam exactly; the other bits stay uniform
        model = ModelledState((2 * math.asin(math.sqrt(lam)),) + (math.pi / 2,) * (n - 1))
        target = (np.arange(1 << n) & 1).astype(bool)
        oracle = mask_oracle(target, sched.alpha)
        sv = run_stage(model, oracle, sched)
        worst_sv = max(worst_sv, abs(1 - qsim.probability_mass(sv, target)))
        assert oracle.queries == sched.g
    for n_base in (4, 8, 10):
        spec = make_spec(n_base, 0)
        base = run_baseline(spec)
        worst_sv = max(worst_sv, abs(1 - base.success_prob))
    ok = worst_2d < 1e-9 and worst_sv < 1e-9
    report("criterion 2 fixed-point determinism", ok,
           f"analytic worst {worst_2d:.2e}, simulator worst {worst_sv:.2e}")


def test_criterion_3_oracle_equivalence(report):
    worst_amp = worst_leak = 0.0
    cases = 0
    for n in (3, 4):
        for seed in range(5):
            spec = make_spec(n, seed)
            sv = random_state(n, np.random.default_rng([seed, n, 7]))
            for ell in range(1, n + 1):
                for alpha in (math.pi / 2, math.pi):
                    dev, leaked = oracle_deviation(spec, ell, alpha, sv)
                    worst_amp = max(worst_amp, dev)
                    worst_leak = max(worst_leak, leaked)
                    cases += 1
    ok = worst_amp < 1e-9 and worst_leak < 1e-12
    report("criterion 3 oracle equivalence", ok,
           f"{cases} cases, amplitude {worst_amp:.2e}, weight off x-register {worst_leak:.2e}")


def test_criterion_4_one_to_one(report):
    rng = np.random.default_rng(4)
    bad = []
    for i in range(50):
        n = int(rng.integers(2, 13))
        spec = make_spec(n, int(rng.integers(2**31)))
        sizes = [len(enumerate_target_set(spec, ell)) for ell in range(n + 1)]
        if sizes != [1 << (n - ell) for ell in range(n + 1)]:
            bad.append((i, n))
    report("criterion 4 one-to-one mapping", not bad, f"50 specs, n in 2..12, mismatches {bad}")


def test_criterion_5_headline(report):
    good = 0
    queries = []
    for rep in range(20):
        _, result = trial(14, 1000, 0, rep=rep)
        queries.append(result.total_circuit_queries)
        good += result.total_circuit_queries == 14 and result.verified
    base = run_baseline(make_spec(14, 0))
    estimate = math.sqrt(2**14)
    ok = good >= 18 and base.total_circuit_queries == 101 and estimate == 128
    report("criterion 5 n=14 headline", ok,
           f"{good}/20 runs at 14 queries and verified (queries {sorted(set(queries))}); "
           f"baseline g={base.total_circuit_queries}, sqrt estimate {estimate:g}")


def test_criterion_6_table_trend(report):
    shots_list = [200, 400, 600, 800, 1000]
    cfg = ExperimentConfig(n=8, shots=shots_list, reps=20, seed=0)
    rows = sweep_rows(cfg)
    high = {s: sum(r[2] >= 0.90 for r in rows if r[0] == s) for s in shots_list}
    top = [sum(r[2] > 0.99 for r in rows if r[0] == s) for s in shots_list]
    inversions = sum(b < a for a, b in zip(top, top[1:]))
    ok_a = high[200] >= 15
    ok_b = all(high[s] >= 18 for s in (800, 1000))
    ok_c = inversions <= 1
    report("criterion 6 success-band trend", ok_a and ok_b and ok_c,
           f">=0.90 counts {list(high.values())}; >0.99 counts {top}; inversions {inversions}")


def test_criterion_7_model_round_trip(report):
    rng = np.random.default_rng(7)
    n, shots = 8, 100_000
    worst_z = 0.0
    for _ in range(20):
        probs = rng.uniform(0.01, 0.99, n)
        counts, _ = qsim.sample_bits(prepare(model_from_probabilities(probs)), shots, rng)
        est = estimate_from_counts(counts, shots).bit_probabilities()
        worst_z = max(worst_z, float(np.max(np.abs(est - probs) / np.sqrt(probs * (1 - probs) / shots))))
    uniform_ok = entropy(uniform_model(n)) == n
    ideal = []
    spec = make_spec(n, 3)
    for ell in range(1, n + 1):
        ideal.append(estimate_lambda(exact_model(stage_mask(spec, ell - 1)), n, ell))
        pinned = model_from_probabilities([1.0] * (ell - 1) + [0.5] * (n - ell + 1))
        ideal.append(estimate_lambda(pinned, n, ell))
    ideal_ok = all(v == 0.5 for v in ideal)
    report("criterion 7 model round-trip", worst_z < 5 and uniform_ok and ideal_ok,
           f"worst |z| {worst_z:.2f} over 160 bits; uniform entropy {entropy(uniform_model(n))}; "
           f"ideal lambda values {sorted(set(ideal))}")


def test_criterion_8_reproducibility(report, tmp_path, capsys):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert main(["run", "--n", "10", "--shots", "500", "--seed", "11", "--out", str(p)]) == 0
    capsys.readouterr()
    json_same = paths[0].read_bytes() == paths[1].read_bytes()
    json.loads(paths[0].read_text())
    base = dict(n=7, shots=[100, 300], reps=8, seed=5)
    serial = render_sweep_csv(sweep_rows(ExperimentConfig(**base)))
    concurrent = render_sweep_csv(sweep_rows(ExperimentConfig(**base, jobs=4)))
    report("criterion 8 reproducibility", json_same and serial == concurrent,
           f"run JSON identical: {json_same}; serial vs concurrent sweep CSV identical: {serial == concurrent}")
