"""
The Scrambler search scenario: a reversible permute-and-XOR "cipher".

    scram(x) = permute_bits(p0 XOR x)
    flags(x) = NOT(scram(x) XOR c0)      (n bits; bit j is the partial oracle f_j)

with ``c0 = scram(x_star)``.  Flag bit j is 1 exactly when the key bit that
the permutation routes to position j agrees with ``x_star``, so the map from
keys to flag states is a bijection and every stage halves the target set.

``perm`` is stored 1-based: ``perm[i - 1]`` is the output position of input
bit i.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError

MAX_ENUMERATION_BITS = 20

# named sub-streams of the master seed
_STREAM_PERM = 0
_STREAM_PLAINTEXT = 1
_STREAM_KEY = 2


def _stream(seed: int, name: int) -> np.random.Generator:
    return np.random.default_rng([seed, name])


@dataclass(frozen=True)
class ScramblerSpec:
    n: int
    perm: tuple[int, ...]
    p0: int
    x_star: int
    c0: int = field(default=-1)
    seed: int | None = None

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"scrambler needs n >= 2, got {self.n}")
        perm = tuple(int(p) for p in self.perm)
        if sorted(perm) != list(range(1, self.n + 1)):
            raise ValueError(f"perm {perm} is not a permutation of 1..{self.n}")
        object.__setattr__(self, "perm", perm)
        for name in ("p0", "x_star"):
            value = getattr(self, name)
            if not 0 <= value < (1 << self.n):
                raise ValueError(f"{name}={value} does not fit in {self.n} bits")
        c0 = _permute_bits(self.p0 ^ self.x_star, perm)
        if self.c0 not in (-1, c0):
            raise ValueError("c0 is inconsistent with scram(p0, x_star)")
        object.__setattr__(self, "c0", c0)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def to_record(self) -> dict:
        fmt = f"0{self.n}b"
        return {
            "n": self.n,
            "perm": list(self.perm),
            "p0": format(self.p0, fmt),
            "x_star": format(self.x_star, fmt),
            "c0": format(self.c0, fmt),
            "seed": self.seed,
            "bit_order": "msb_first_display",
        }

    @classmethod
    def from_record(cls, record: dict) -> "ScramblerSpec":
        if record.get("bit_order", "msb_first_display") != "msb_first_display":
            raise ValueError(f"unsupported bit_order {record['bit_order']!r}")
        return cls(
            n=int(record["n"]),
            perm=tuple(record["perm"]),
            p0=int(record["p0"], 2),
            x_star=int(record["x_star"], 2),
            c0=int(record["c0"], 2) if "c0" in record else -1,
            seed=record.get("seed"),
        )


def _permute_bits(v, perm):
    """Route input bit i to output position perm[i-1]; works on ints and int arrays."""
    out = v & 0
    for i, dest in enumerate(perm):
        out = out | (((v >> i) & 1) << (dest - 1))
    return out


def make_spec(
    n: int,
    seed: int,
    x_star: int | None = None,
    perm=None,
    p0: int | None = None,
    perm_seed: int | None = None,
) -> ScramblerSpec:
    """Draw a scrambler instance from ``seed``.

    The permutation, plaintext and key come from independent sub-streams of the
    seed, so fixing one (or passing ``perm_seed``) leaves the others unchanged.
    """
    if n < 2:
        raise ValueError(f"scrambler needs n >= 2, got {n}")
    if perm is None:
        rng = _stream(seed if perm_seed is None else perm_seed, _STREAM_PERM)
        perm = tuple(int(p) + 1 for p in rng.permutation(n))
    if p0 is None:
        p0 = int(_stream(seed, _STREAM_PLAINTEXT).integers(0, 1 << n))
    if x_star is None:
        x_star = int(_stream(seed, _STREAM_KEY).integers(0, 1 << n))
    return ScramblerSpec(n=n, perm=tuple(perm), p0=p0, x_star=x_star, seed=seed)


def scram(spec: ScramblerSpec, x):
    return _permute_bits(spec.p0 ^ x, spec.perm)


def unscram(spec: ScramblerSpec, c):
    """Inverse of ``scram`` in the key argument."""
    inverse = [0] * spec.n
    for i, dest in enumerate(spec.perm):
        inverse[dest - 1] = i + 1
    return _permute_bits(c, inverse) ^ spec.p0


def flags(spec: ScramblerSpec, x):
    return ~(scram(spec, x) ^ spec.c0) & spec.full_mask


def stage_member(spec: ScramblerSpec, ell: int, x):
    """True where the first ``ell`` flag bits of ``x`` are all 1 (vectorizes over arrays)."""
    if not 0 <= ell <= spec.n:
        raise ValueError(f"stage index {ell} outside 0..{spec.n}")
    low = (1 << ell) - 1
    return (flags(spec, x) & low) == low


def stage_mask(spec: ScramblerSpec, ell: int) -> np.ndarray:
    """Boolean mask over all ``2**n`` keys marking the stage target set."""
    xs = np.arange(1 << spec.n, dtype=np.int64)
    return np.asarray(stage_member(spec, ell, xs), dtype=bool)


def enumerate_target_set(spec: ScramblerSpec, ell: int) -> set[int]:
    if spec.n > MAX_ENUMERATION_BITS:
        raise CapacityError(f"enumeration limited to n <= {MAX_ENUMERATION_BITS}")
    return {int(x) for x in np.flatnonzero(stage_mask(spec, ell))}
