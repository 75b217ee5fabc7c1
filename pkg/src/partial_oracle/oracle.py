"""
Stage phase oracles.

The production path is diagonal: the x register picks up ``exp(i*alpha)`` on
every key in the stage target set.  ``apply_oracle_full_circuit`` builds the
same operator literally on a ``2n + 1`` qubit register (keys, flag register,
ancilla): load the plaintext, scramble, compare against the ciphertext,
flip the ancilla on the first ``ell`` flags, phase the ancilla, then undo
everything.  The uncompute step leaves the flag register and ancilla back in
``|0>``, so its x-register action must match the diagonal form exactly.

Register layout of the joint state (LSB-first):
    bits 1..n        key register x
    bits n+1..2n     flag register y
    bit 2n+1         ancilla
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import qsim
from .errors import CapacityError
from .qsim import StateVector
from .scrambler import ScramblerSpec, _permute_bits, stage_mask

MAX_CIRCUIT_BITS = 6


@dataclass
class StageOracle:
    """Phase oracle for one stage; ``queries`` counts applications."""

    mask: np.ndarray
    alpha: float = math.pi
    queries: int = 0
    spec: ScramblerSpec | None = None
    ell: int | None = None

    @property
    def n_qubits(self) -> int:
        return int(self.mask.size).bit_length() - 1

    @property
    def target_size(self) -> int:
        return int(np.count_nonzero(self.mask))


def stage_oracle(spec: ScramblerSpec, ell: int, alpha: float = math.pi) -> StageOracle:
    return StageOracle(mask=stage_mask(spec, ell), alpha=alpha, spec=spec, ell=ell)


def mask_oracle(mask, alpha: float = math.pi) -> StageOracle:
    """Oracle for an arbitrary target set given as a boolean mask over basis states."""
    mask = np.asarray(mask, dtype=bool)
    if mask.size < 2 or mask.size & (mask.size - 1):
        raise ValueError("mask length must be a power of two >= 2")
    return StageOracle(mask=mask, alpha=alpha)


def apply_oracle(oracle: StageOracle, sv: StateVector, alpha: float | None = None) -> StateVector:
    if sv.dim != oracle.mask.size:
        raise ValueError(f"oracle acts on {oracle.n_qubits} qubits, state has {sv.n_qubits}")
    oracle.queries += 1
    return qsim.apply_diagonal_phase(sv, oracle.mask, oracle.alpha if alpha is None else alpha)


def embed_joint(sv: StateVector) -> StateVector:
    """Tensor the key state with ``|0>`` on the flag register and ancilla."""
    n = sv.n_qubits
    amps = np.zeros(1 << (2 * n + 1), dtype=np.complex128)
    amps[: sv.dim] = sv.amplitudes
    return StateVector(2 * n + 1, amps)


def split_joint(joint: StateVector, n: int) -> tuple[StateVector, float]:
    """Return the key-register state on the ``|y=0, anc=0>`` branch and the weight left elsewhere.

    When the weight is zero the registers are disentangled and the returned
    state is the exact reduced x-register state.
    """
    amps = joint.amplitudes
    clean = amps[: 1 << n].copy()
    leaked = float(np.sum(np.abs(amps[1 << n:]) ** 2))
    return StateVector(n, clean), leaked


def _circuit_layers(spec: ScramblerSpec, ell: int):
    """Reversible layers computing the flags into y and the stage bit into the ancilla."""
    n = spec.n
    low_x = (1 << n) - 1
    anc = 1 << (2 * n)
    inverse = [0] * n
    for i, dest in enumerate(spec.perm):
        inverse[dest - 1] = i + 1
    not_c0 = ~spec.c0 & low_x
    controls = (1 << ell) - 1

    def y_of(idx):
        return (idx >> n) & low_x

    def with_y(idx, y):
        return (idx & ~(low_x << n)) | (y << n)

    load = lambda idx: idx ^ (spec.p0 << n)
    cnot_xy = lambda idx: idx ^ ((idx & low_x) << n)
    swap = lambda idx: with_y(idx, _permute_bits(y_of(idx), spec.perm))
    unswap = lambda idx: with_y(idx, _permute_bits(y_of(idx), inverse))
    compare = lambda idx: idx ^ (not_c0 << n)
    mcx = lambda idx: np.where((y_of(idx) & controls) == controls, idx ^ anc, idx)

    compute = [load, cnot_xy, swap, compare, mcx]
    uncompute = [mcx, compare, unswap, cnot_xy, load]
    return compute, uncompute


def apply_oracle_full_circuit(
    oracle: StageOracle, joint_sv: StateVector, alpha: float | None = None
) -> StateVector:
    spec, ell = oracle.spec, oracle.ell
    if spec is None or ell is None:
        raise ValueError("full-circuit oracle needs a scrambler stage oracle")
    if spec.n > MAX_CIRCUIT_BITS:
        raise CapacityError(f"joint-register circuit limited to n <= {MAX_CIRCUIT_BITS}")
    if joint_sv.n_qubits != 2 * spec.n + 1:
        raise ValueError(f"joint register must have {2 * spec.n + 1} qubits")
    alpha = oracle.alpha if alpha is None else alpha
    compute, uncompute = _circuit_layers(spec, ell)

    sv = joint_sv
    for layer in compute:
        sv = qsim.apply_basis_permutation(sv, layer)
    anc = 1 << (2 * spec.n)
    ancilla_set = (np.arange(sv.dim) & anc) != 0
    sv = qsim.apply_diagonal_phase(sv, ancilla_set, alpha)
    for layer in uncompute:
        sv = qsim.apply_basis_permutation(sv, layer)
    oracle.queries += 1
    return sv
