import numpy as np
import pytest


def full_operator(single: np.ndarray, j: int, n: int) -> np.ndarray:
    """Explicit 2^n x 2^n matrix of a one-bit gate on bit j (LSB-first), built with kron."""
    return np.kron(np.kron(np.eye(1 << (n - j)), single), np.eye(1 << (j - 1)))


def uniform_amplitudes(n: int) -> np.ndarray:
    return np.full(1 << n, 1 / np.sqrt(1 << n), dtype=complex)


def reflection(alpha: float, vec: np.ndarray) -> np.ndarray:
    """I + (e^{i alpha} - 1)|v><v| built as a dense outer product."""
    v = vec / np.linalg.norm(vec)
    return np.eye(v.size) + (np.exp(1j * alpha) - 1) * np.outer(v, v.conj())


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
