"""
Small-n self checks: oracle circuit equivalence, Grover-Long determinism and
scrambler bijectivity.  Each check reports its worst numerical deviation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import qsim
from .grover_long import analytic_2d, run_stage, schedule_for
from .oracle import apply_oracle, apply_oracle_full_circuit, embed_joint, split_joint, stage_oracle
from .qsim import StateVector
from .scrambler import flags, make_spec, stage_mask
from .search import run_search
from .state_model import uniform_model

TOLERANCE = 1e-9
VERIFY_SEEDS = (0, 1, 2)
DETERMINISM_LAMBDAS = (0.5, 0.25, 0.1, 0.01, 2.0 ** -14)


@dataclass
class CheckResult:
    name: str
    passed: bool
    worst_deviation: float


def random_state(n: int, rng: np.random.Generator) -> StateVector:
    amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return StateVector(n, amps / np.linalg.norm(amps))


def oracle_deviation(spec, ell: int, alpha: float, sv: StateVector) -> tuple[float, float]:
    """Max amplitude difference between the diagonal and full-circuit oracles, and leaked weight."""
    fast = apply_oracle(stage_oracle(spec, ell, alpha), sv)
    joint = apply_oracle_full_circuit(stage_oracle(spec, ell, alpha), embed_joint(sv))
    reduced, leaked = split_joint(joint, spec.n)
    return float(np.max(np.abs(reduced.amplitudes - fast.amplitudes))), leaked


def check_oracle_equivalence(max_n: int, alphas=(math.pi / 2, math.pi)) -> CheckResult:
    worst = 0.0
    for n in range(2, max_n + 1):
        for seed in VERIFY_SEEDS:
            spec = make_spec(n, seed)
            rng = np.random.default_rng([seed, n])
            sv = random_state(n, rng)
            for ell in range(n + 1):
                for alpha in alphas:
                    dev, leaked = oracle_deviation(spec, ell, alpha, sv)
                    worst = max(worst, dev, leaked)
    return CheckResult("oracle_equivalence", worst < TOLERANCE, worst)


def check_determinism(max_n: int) -> CheckResult:
    worst = 0.0
    for lam in DETERMINISM_LAMBDAS:
        sched = schedule_for(lam)
        _, b = analytic_2d(lam, sched.alpha, sched.g)
        worst = max(worst, abs(1.0 - abs(b) ** 2))
    for n in range(2, max_n + 1):
        for seed in VERIFY_SEEDS:
            spec = make_spec(n, seed)
            # one-shot Grover-Long on the full oracle from the uniform state
            sched = schedule_for(2.0 ** -n)
            sv = run_stage(uniform_model(n), stage_oracle(spec, n, sched.alpha), sched)
            worst = max(worst, abs(1.0 - qsim.probability_of(sv, spec.x_star)))
            result = run_search(spec, 1, np.random.default_rng(seed), exact_models=True)
            worst = max(worst, abs(1.0 - result.success_prob))
    return CheckResult("grover_long_determinism", worst < TOLERANCE, worst)


def check_bijection(max_n: int) -> CheckResult:
    ok = True
    for n in range(2, max(max_n, 8) + 1):
        for seed in VERIFY_SEEDS:
            spec = make_spec(n, seed)
            xs = np.arange(1 << n, dtype=np.int64)
            ok &= np.unique(flags(spec, xs)).size == xs.size
            for ell in range(n + 1):
                ok &= int(np.count_nonzero(stage_mask(spec, ell))) == 1 << (n - ell)
    return CheckResult("scrambler_bijection", bool(ok), 0.0)


def run_checks(max_n: int) -> list[CheckResult]:
    return [check_oracle_equivalence(max_n), check_determinism(max_n), check_bijection(max_n)]
