"""
Minimal dense statevector simulator.

Bit convention: bit j (1-based) of a register is the j-th least significant
bit of the basis-state integer, i.e. ``(x >> (j - 1)) & 1``.  Every gate in
this module, and every serialized output of the package, uses that
convention.

Only the gate families the partial-oracle search needs are provided:
Walsh-Hadamard, the real single-bit rotation ``R_beta``, diagonal phases,
the phase on ``|0...0>`` and reversible basis permutations (classical gates).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import CapacityError, NormalizationError

MAX_QUBITS = 24
NORM_TOLERANCE = 1e-8

_SQRT2_INV = 1.0 / np.sqrt(2.0)
_H = np.array([[1.0, 1.0], [1.0, -1.0]]) * _SQRT2_INV


@dataclass
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (1 << self.n_qubits,):
            raise ValueError(
                f"expected {1 << self.n_qubits} amplitudes for {self.n_qubits} qubits, "
                f"got shape {self.amplitudes.shape}"
            )

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.probabilities())))

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amplitudes.copy())


def _checked(sv: StateVector) -> StateVector:
    drift = abs(sv.norm() - 1.0)
    if drift > NORM_TOLERANCE:
        raise NormalizationError(f"norm drifted by {drift:.3e}")
    return sv


def _check_bit(sv: StateVector, j: int) -> None:
    if not 1 <= j <= sv.n_qubits:
        raise IndexError(f"bit index {j} outside 1..{sv.n_qubits}")


def _apply_1q(sv: StateVector, matrix: np.ndarray, j: int) -> StateVector:
    # axis 1 of the reshaped tensor is bit j under the LSB-first convention
    psi = sv.amplitudes.reshape(1 << (sv.n_qubits - j), 2, 1 << (j - 1))
    out = np.einsum("ab,ibk->iak", matrix, psi)
    return _checked(StateVector(sv.n_qubits, out.reshape(-1)))


def zero_state(n: int, max_qubits: int = MAX_QUBITS) -> StateVector:
    if not 1 <= n <= max_qubits:
        raise CapacityError(f"qubit count {n} outside 1..{max_qubits}")
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(n, amps)


def basis_state(n: int, x: int, max_qubits: int = MAX_QUBITS) -> StateVector:
    sv = zero_state(n, max_qubits)
    if not 0 <= x < sv.dim:
        raise IndexError(f"basis state {x} outside 0..{sv.dim - 1}")
    sv.amplitudes[0] = 0.0
    sv.amplitudes[x] = 1.0
    return sv


def apply_walsh_hadamard(sv: StateVector) -> StateVector:
    out = sv
    for j in range(1, sv.n_qubits + 1):
        out = _apply_1q(out, _H, j)
    return out


def bit_rotation_matrix(beta: float) -> np.ndarray:
    """The real, self-adjoint rotation ``[[c, s], [s, -c]]`` with c, s = cos, sin of beta/2."""
    c, s = np.cos(beta / 2.0), np.sin(beta / 2.0)
    return np.array([[c, s], [s, -c]])


def apply_bit_rotation(sv: StateVector, j: int, beta: float) -> StateVector:
    _check_bit(sv, j)
    return _apply_1q(sv, bit_rotation_matrix(beta), j)


def apply_diagonal_phase(sv: StateVector, member, alpha: float) -> StateVector:
    """Multiply ``exp(i*alpha)`` onto every basis state selected by ``member``.

    ``member`` is either a boolean mask of length ``2**n`` or a predicate over
    basis-state integers.
    """
    mask = membership_mask(member, sv.dim)
    out = sv.amplitudes.copy()
    out[mask] *= np.exp(1j * alpha)
    return _checked(StateVector(sv.n_qubits, out))


def membership_mask(member, dim: int) -> np.ndarray:
    if callable(member):
        return np.fromiter((bool(member(x)) for x in range(dim)), dtype=bool, count=dim)
    mask = np.asarray(member, dtype=bool)
    if mask.shape != (dim,):
        raise ValueError(f"mask shape {mask.shape} does not match dimension {dim}")
    return mask


def apply_phase_on_zero(sv: StateVector, alpha: float) -> StateVector:
    out = sv.amplitudes.copy()
    out[0] *= np.exp(1j * alpha)
    return _checked(StateVector(sv.n_qubits, out))


def apply_global_phase(sv: StateVector, factor: complex) -> StateVector:
    return _checked(StateVector(sv.n_qubits, sv.amplitudes * factor))


def apply_basis_permutation(sv: StateVector, mapping: np.ndarray | Callable[[np.ndarray], np.ndarray]) -> StateVector:
    """Apply a reversible classical gate: ``|x> -> |mapping[x]>``.

    ``mapping`` is an integer array (or a vectorized function of the index
    array) that must be a bijection on ``0..2**n - 1``.
    """
    idx = np.arange(sv.dim, dtype=np.int64)
    target = np.asarray(mapping(idx) if callable(mapping) else mapping, dtype=np.int64)
    if target.shape != idx.shape or not np.array_equal(np.sort(target), idx):
        raise ValueError("mapping is not a bijection on the basis states")
    out = np.empty_like(sv.amplitudes)
    out[target] = sv.amplitudes
    return StateVector(sv.n_qubits, out)


def probability_of(sv: StateVector, x: int) -> float:
    if not 0 <= x < sv.dim:
        raise IndexError(f"basis state {x} outside 0..{sv.dim - 1}")
    return float(abs(sv.amplitudes[x]) ** 2)


def probability_mass(sv: StateVector, member) -> float:
    return float(np.sum(sv.probabilities()[membership_mask(member, sv.dim)]))


def sample_bits(sv: StateVector, shots: int, rng: np.random.Generator) -> tuple[np.ndarray, dict[int, int]]:
    """Draw ``shots`` measurement outcomes of the full register.

    Returns ``(one_counts, histogram)``: ``one_counts[j - 1]`` is how often bit j
    read 1, and ``histogram`` maps each observed basis state to its count.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    cdf = np.cumsum(sv.probabilities())
    draws = rng.random(shots) * cdf[-1]
    outcomes = np.minimum(np.searchsorted(cdf, draws, side="right"), sv.dim - 1)
    bits = (outcomes[:, None] >> np.arange(sv.n_qubits)) & 1
    one_counts = bits.sum(axis=0).astype(np.int64)
    values, counts = np.unique(outcomes, return_counts=True)
    histogram = {int(v): int(c) for v, c in zip(values, counts)}
    return one_counts, histogram
