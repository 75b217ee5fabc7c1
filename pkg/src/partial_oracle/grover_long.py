"""
Grover-Long (phase-matched, fixed-point) amplitude amplification.

With target weight ``lam`` the schedule is

    g     = ceil(pi / (4 asin(sqrt(lam))) - 1/2)
    alpha = 2 asin(sin(pi / (4g + 2)) / sqrt(lam))

and ``g`` applications of ``G(alpha) = -S(alpha, start) S(alpha, target)``
rotate the start state exactly onto the target when ``lam`` is exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import qsim
from .oracle import StageOracle, apply_oracle
from .qsim import StateVector
from .state_model import ModelledState, prepare, rotate

# lam at or above this is treated as "already on target"
SKIP_THRESHOLD = 0.999
# snaps ceil() arguments that land within rounding noise of an integer
_CEIL_SLACK = 1e-9
# asin is ill-conditioned at 1; arguments this close are treated as exactly 1
_ASIN_SLACK = 1e-13


@dataclass(frozen=True)
class StageSchedule:
    lam: float
    lam_bar: float
    g: int
    alpha: float

    def to_record(self) -> dict:
        return {"lambda": self.lam, "lambda_bar": self.lam_bar, "g": self.g, "alpha": self.alpha}


def iteration_count(lam: float) -> int:
    if not 0.0 < lam <= 1.0:
        raise ValueError(f"target weight must lie in (0, 1], got {lam}")
    raw = math.pi / (4.0 * math.asin(math.sqrt(lam))) - 0.5
    nearest = round(raw)
    if abs(raw - nearest) < _CEIL_SLACK:
        return int(nearest)
    return math.ceil(raw)


def phase_for(lam: float, g: int) -> float:
    arg = math.sin(math.pi / (4 * g + 2)) / math.sqrt(lam)
    if arg > 1.0 - _ASIN_SLACK:
        return math.pi
    return 2.0 * math.asin(arg)


def schedule_for(lam: float) -> StageSchedule:
    if not 0.0 < lam <= 1.0:
        raise ValueError(f"target weight must lie in (0, 1], got {lam}")
    g = 0 if lam >= SKIP_THRESHOLD else iteration_count(lam)
    return StageSchedule(lam=lam, lam_bar=1.0 - lam, g=g, alpha=phase_for(lam, g))


def grover_iterate(sv: StateVector, oracle: StageOracle, model: ModelledState, alpha: float) -> StateVector:
    """One application of ``-S(alpha, mu) S(alpha, target)``; consumes one oracle query."""
    sv = apply_oracle(oracle, sv, alpha)
    sv = rotate(model, sv)
    sv = qsim.apply_phase_on_zero(sv, alpha)
    sv = rotate(model, sv)
    return qsim.apply_global_phase(sv, -1.0)


def run_stage(model_prev: ModelledState, oracle: StageOracle, schedule: StageSchedule) -> StateVector:
    sv = prepare(model_prev)
    for _ in range(schedule.g):
        sv = grover_iterate(sv, oracle, model_prev, schedule.alpha)
    return sv


def reflection_2d(alpha: float, lam: float) -> np.ndarray:
    """``S(alpha, start)`` in the (off-target, on-target) basis."""
    lam_bar = 1.0 - lam
    e = np.exp(1j * alpha) - 1.0
    off = e * math.sqrt(lam * lam_bar)
    return np.array([[1.0 + e * lam_bar, off], [off, 1.0 + e * lam]])


def analytic_2d(lam: float, alpha: float, g: int) -> tuple[complex, complex]:
    """Evolve ``(sqrt(1-lam), sqrt(lam))`` through ``g`` two-dimensional Grover-Long iterates.

    Independent of the statevector path; used to cross-check it.
    """
    if not 0.0 < lam <= 1.0:
        raise ValueError(f"target weight must lie in (0, 1], got {lam}")
    mark = np.diag([1.0, np.exp(1j * alpha)])
    step = -reflection_2d(alpha, lam) @ mark
    vec = np.array([math.sqrt(1.0 - lam), math.sqrt(lam)], dtype=complex)
    for _ in range(g):
        vec = step @ vec
    return complex(vec[0]), complex(vec[1])
