"""
Outer loop of the partial-oracle search, plus a single-stage Grover-Long baseline.

Each stage constrains one more flag bit (two with ``bits_per_stage=2``).  The
stage state is prepared fresh from ``|0>`` with the previous model's rotation,
amplified with the stage oracle, measured ``shots`` times, and the per-bit
statistics become the next model.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from . import qsim
from .errors import CapacityError
from .grover_long import StageSchedule, run_stage, schedule_for
from .oracle import StageOracle, stage_oracle
from .qsim import StateVector
from .scrambler import ScramblerSpec, flags, make_spec
from .state_model import (
    ENTROPY_SOURCES,
    ModelledState,
    entropy,
    estimate_from_counts,
    estimate_lambda,
    exact_model,
    observed_entropy,
    uniform_model,
)

_SEARCH_STREAM = 3


@dataclass
class StageReport:
    ell: int
    flag_bits: int
    lambda_hat: float
    lambda_true: float
    g: int
    alpha: float
    circuit_queries: int
    entropy_before: float
    exact_target_prob: float
    betas_after: tuple[float, ...]

    def to_record(self) -> dict:
        return {
            "ell": self.ell,
            "flag_bits": self.flag_bits,
            "lambda_hat": self.lambda_hat,
            "lambda_true": self.lambda_true,
            "g": self.g,
            "alpha": self.alpha,
            "circuit_queries": self.circuit_queries,
            "entropy_before": self.entropy_before,
            "exact_target_prob": self.exact_target_prob,
            "betas_after": list(self.betas_after),
        }


@dataclass
class SearchResult:
    found_key: int
    verified: bool
    success_prob: float
    total_circuit_queries: int
    total_shot_queries: int
    stages: list[StageReport]
    n: int
    shots: int

    def to_record(self) -> dict:
        return {
            "bit_order": "msb_first_display",
            "n": self.n,
            "shots": self.shots,
            "found_key": format(self.found_key, f"0{self.n}b"),
            "verified": self.verified,
            "success_prob": self.success_prob,
            "total_circuit_queries": self.total_circuit_queries,
            "total_shot_queries": self.total_shot_queries,
            "stages": [s.to_record() for s in self.stages],
        }


@dataclass
class SearchRun:
    """Mutable state threaded through the stages of one search."""

    spec: ScramblerSpec
    shots: int
    rng: np.random.Generator
    bits_per_stage: int = 1
    exact_models: bool = False
    entropy_source: str = "counts"
    model: ModelledState = None
    state: StateVector | None = None
    histogram: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.shots < 1:
            raise ValueError("shots must be >= 1")
        if self.bits_per_stage not in (1, 2):
            raise ValueError("bits_per_stage must be 1 or 2")
        if self.entropy_source not in ENTROPY_SOURCES:
            raise ValueError(f"entropy_source must be one of {ENTROPY_SOURCES}")
        if self.model is None:
            self.model = uniform_model(self.spec.n)

    @property
    def n_stages(self) -> int:
        return math.ceil(self.spec.n / self.bits_per_stage)

    def flag_bits(self, ell: int) -> int:
        return min(self.spec.n, ell * self.bits_per_stage)


def stage_step(run: SearchRun, ell: int) -> StageReport:
    n = run.spec.n
    k = run.flag_bits(ell)
    model_prev = run.model
    h_before = observed_entropy(model_prev) if run.entropy_source == "counts" else entropy(model_prev)
    schedule: StageSchedule = schedule_for(estimate_lambda(model_prev, n, k, run.entropy_source))
    oracle: StageOracle = stage_oracle(run.spec, k, schedule.alpha)

    sv = run_stage(model_prev, oracle, schedule)
    one_counts, run.histogram = qsim.sample_bits(sv, run.shots, run.rng)
    run.model = exact_model(oracle.mask) if run.exact_models else estimate_from_counts(one_counts, run.shots)
    run.state = sv

    return StageReport(
        ell=ell,
        flag_bits=k,
        lambda_hat=schedule.lam,
        lambda_true=_model_weight(model_prev, oracle.mask),
        g=schedule.g,
        alpha=schedule.alpha,
        circuit_queries=oracle.queries,
        entropy_before=h_before,
        exact_target_prob=qsim.probability_mass(sv, oracle.mask),
        betas_after=run.model.betas,
    )


def _model_weight(model: ModelledState, mask: np.ndarray) -> float:
    """Exact weight of the stage target inside the modelled start state."""
    probs = model.bit_probabilities()
    xs = np.flatnonzero(mask)
    bits = (xs[:, None] >> np.arange(model.n)) & 1
    return float(np.sum(np.prod(np.where(bits == 1, probs, 1.0 - probs), axis=1)))


def _modal_key(histogram: dict[int, int]) -> int:
    best = max(histogram.values())
    return min(k for k, c in histogram.items() if c == best)


def run_search(
    spec: ScramblerSpec,
    shots: int,
    rng: np.random.Generator,
    bits_per_stage: int = 1,
    exact_models: bool = False,
    entropy_source: str = "counts",
) -> SearchResult:
    run = SearchRun(
        spec, shots, rng, bits_per_stage=bits_per_stage, exact_models=exact_models, entropy_source=entropy_source
    )
    reports = [stage_step(run, ell) for ell in range(1, run.n_stages + 1)]
    found = _modal_key(run.histogram)
    total = sum(r.circuit_queries for r in reports)
    return SearchResult(
        found_key=found,
        verified=bool(flags(spec, found) == spec.full_mask),
        success_prob=qsim.probability_of(run.state, spec.x_star),
        total_circuit_queries=total,
        total_shot_queries=total * shots,
        stages=reports,
        n=spec.n,
        shots=shots,
    )


def run_baseline(spec: ScramblerSpec) -> SearchResult:
    """Plain Grover-Long with the full oracle from the uniform state, exact weight ``2**-n``."""
    if spec.n > qsim.MAX_QUBITS:
        raise CapacityError(f"baseline limited to n <= {qsim.MAX_QUBITS}")
    model = uniform_model(spec.n)
    schedule = schedule_for(2.0 ** -spec.n)
    oracle = stage_oracle(spec, spec.n, schedule.alpha)
    sv = run_stage(model, oracle, schedule)
    found = int(np.argmax(sv.probabilities()))
    report = StageReport(
        ell=1,
        flag_bits=spec.n,
        lambda_hat=schedule.lam,
        lambda_true=schedule.lam,
        g=schedule.g,
        alpha=schedule.alpha,
        circuit_queries=oracle.queries,
        entropy_before=entropy(model),
        exact_target_prob=qsim.probability_mass(sv, oracle.mask),
        betas_after=model.betas,
    )
    return SearchResult(
        found_key=found,
        verified=bool(flags(spec, found) == spec.full_mask),
        success_prob=qsim.probability_of(sv, spec.x_star),
        total_circuit_queries=oracle.queries,
        total_shot_queries=0,
        stages=[report],
        n=spec.n,
        shots=0,
    )


def search_rng(spec_seed: int, shots: int) -> np.random.Generator:
    return np.random.default_rng([spec_seed, _SEARCH_STREAM, shots])


def repetition_seed(seed: int, rep: int) -> int:
    """Scenario seed for repetition ``rep`` of a sweep; independent of execution order."""
    return int(np.random.SeedSequence([seed, rep]).generate_state(1, dtype=np.uint32)[0])


def trial(
    n: int,
    shots: int,
    seed: int,
    rep: int | None = None,
    key: int | None = None,
    perm_seed: int | None = None,
    bits_per_stage: int = 1,
    entropy_source: str = "counts",
) -> tuple[ScramblerSpec, SearchResult]:
    """Build the scenario for (seed, rep) and run one search on it."""
    spec_seed = seed if rep is None else repetition_seed(seed, rep)
    spec = make_spec(n, spec_seed, x_star=key, perm_seed=perm_seed)
    rng = search_rng(spec_seed, shots)
    result = run_search(spec, shots, rng, bits_per_stage=bits_per_stage, entropy_source=entropy_source)
    return spec, result


# display bands for success probabilities; the last is strictly above 0.99
BANDS = ("<0.50", "0.50-0.59", "0.60-0.69", "0.70-0.79", "0.80-0.89", "0.90-0.99", ">0.99")


def band_of(p: float) -> str:
    if p > 0.99:
        return BANDS[-1]
    if p < 0.5:
        return BANDS[0]
    return BANDS[min(int(p * 10) - 4, 5)]


def band_counts(probs) -> Counter:
    out = Counter({label: 0 for label in BANDS})
    out.update(band_of(p) for p in probs)
    return out
