"""
Bitwise modelled states.

A model is a product state ``prod_j (cos(b_j/2)|0> + sin(b_j/2)|1>)`` fitted
from per-bit measurement statistics.  The same angles define the preparation
rotation ``R(mu) = R_{b_n} ... R_{b_1}``, which is its own inverse.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import qsim
from .qsim import StateVector


@dataclass(frozen=True)
class ModelledState:
    betas: tuple[float, ...]
    p_min: float = 0.0
    shots_used: int = 0
    # raw per-bit frequencies before the Bayes floor, when fitted from counts
    observed: tuple[float, ...] | None = None

    @property
    def n(self) -> int:
        return len(self.betas)

    def bit_probabilities(self) -> np.ndarray:
        """Probability that each bit reads 1, ``sin^2(beta/2)``."""
        return (1.0 - np.cos(np.asarray(self.betas))) / 2.0

    def to_record(self) -> dict:
        return {
            "betas": [float(b) for b in self.betas],
            "p_min": self.p_min,
            "shots_used": self.shots_used,
            "observed": None if self.observed is None else list(self.observed),
        }


def uniform_model(n: int) -> ModelledState:
    if n < 1:
        raise ValueError("n must be >= 1")
    return ModelledState(betas=(math.pi / 2,) * n)


def model_from_probabilities(probs, p_min: float = 0.0, shots_used: int = 0, observed=None) -> ModelledState:
    probs = np.asarray(probs, dtype=float)
    if np.any((probs < 0) | (probs > 1)):
        raise ValueError("bit probabilities must lie in [0, 1]")
    betas = 2.0 * np.arcsin(np.sqrt(probs))
    if observed is not None:
        observed = tuple(float(p) for p in observed)
    return ModelledState(
        betas=tuple(float(b) for b in betas), p_min=p_min, shots_used=shots_used, observed=observed
    )


def estimate_from_counts(one_counts, shots: int) -> ModelledState:
    """Fit the angles from per-bit counts of 1, flooring at the Bayes estimate ``1/(1+shots)``."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    counts = np.asarray(one_counts)
    if np.any((counts < 0) | (counts > shots)):
        raise ValueError(f"bit counts must lie in [0, {shots}]")
    p_min = 1.0 / (1.0 + shots)
    freqs = counts / shots
    probs = np.clip(freqs, p_min, 1.0 - p_min)
    return model_from_probabilities(probs, p_min=p_min, shots_used=shots, observed=freqs)


def _binary_entropy(p: np.ndarray) -> np.ndarray:
    q = 1.0 - p
    with np.errstate(divide="ignore", invalid="ignore"):
        hp = np.where(p > 0, -p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
        hq = np.where(q > 0, -q * np.log2(np.where(q > 0, q, 1.0)), 0.0)
    return hp + hq


def entropy(model: ModelledState) -> float:
    """Shannon entropy (bits) of the model's basis-state distribution."""
    return float(np.sum(_binary_entropy(model.bit_probabilities())))


def observed_entropy(model: ModelledState) -> float:
    """Entropy of the measured bit frequencies, ignoring the Bayes floor.

    Falls back to ``entropy(model)`` for models not fitted from counts.
    """
    if model.observed is None:
        return entropy(model)
    return float(np.sum(_binary_entropy(np.asarray(model.observed))))


ENTROPY_SOURCES = ("counts", "betas")


def estimate_lambda(model: ModelledState, n: int, ell: int, entropy_source: str = "counts") -> float:
    """Estimated weight of the stage target within the modelled state.

    ``ell`` is the number of flag bits the stage constrains.  The result is
    ``2**((n - ell) - H)``, clamped into ``[2**-n, 1]``.  By default ``H`` is
    the entropy of the raw measured frequencies, so the floor only shapes the
    preparation angles; ``entropy_source="betas"`` uses the floored angles.
    """
    if not 1 <= ell <= n:
        raise ValueError(f"stage index {ell} outside 1..{n}")
    if entropy_source not in ENTROPY_SOURCES:
        raise ValueError(f"entropy_source must be one of {ENTROPY_SOURCES}")
    h = observed_entropy(model) if entropy_source == "counts" else entropy(model)
    lam = 2.0 ** ((n - ell) - h)
    return min(1.0, max(lam, 2.0 ** -n))


def rotate(model: ModelledState, sv: StateVector) -> StateVector:
    """Apply ``R(mu)``; since ``R(mu)`` is self-adjoint this is also ``R^dagger(mu)``."""
    if sv.n_qubits != model.n:
        raise ValueError(f"model has {model.n} bits, state has {sv.n_qubits}")
    for j, beta in enumerate(model.betas, start=1):
        sv = qsim.apply_bit_rotation(sv, j, beta)
    return sv


def prepare(model: ModelledState, sv: StateVector | None = None) -> StateVector:
    """Prepare ``|mu>`` from ``|0>`` (a fresh zero state if ``sv`` is omitted)."""
    if sv is None:
        sv = qsim.zero_state(model.n)
    return rotate(model, sv)


def exact_model(mask: np.ndarray) -> ModelledState:
    """Per-bit marginals of the uniform superposition over a target set.

    This reproduces the target state itself only when the set is a product
    set (some bits pinned, the rest free), which holds for the scrambler.
    """
    mask = np.asarray(mask, dtype=bool)
    n = int(mask.size).bit_length() - 1
    members = np.flatnonzero(mask)
    if members.size == 0:
        raise ValueError("empty target set")
    bits = (members[:, None] >> np.arange(n)) & 1
    probs = bits.sum(axis=0) / members.size
    return model_from_probabilities(probs)
