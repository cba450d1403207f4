"""Explicit preparations and measurements that attain the bounds."""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Sequence

import numpy as np

from .bounds import PartitionSpec, _check_omega
from .qcore import BinaryMeasurement, PureState, ket, tensor

ATOL_ENERGY = 1e-9


def _as_bits(msg: Sequence[int]) -> tuple[int, ...]:
    bits = tuple(int(b) for b in msg)
    if not bits or any(b not in (0, 1) for b in bits):
        raise ValueError(f"message must be a nonempty bit vector, got {msg!r}")
    return bits


def messages(n: int) -> list[tuple[int, ...]]:
    """All ``2**n`` messages in lexicographic order."""
    return list(product((0, 1), repeat=n))


@dataclass(frozen=True)
class StrategySpec:
    """Energy split of a partition-wise preparation.

    ``energies[j]`` is the non-vacuum weight allotted to group ``j`` of
    ``partition`` (in its stored, non-increasing order).
    """

    n: int
    omega: float
    partition: PartitionSpec
    energies: tuple[float, ...]

    def __post_init__(self):
        if self.partition.n != self.n:
            raise ValueError("partition does not cover n parties")
        if len(self.energies) != self.partition.m:
            raise ValueError("need one energy per group")
        vac = math.prod(1.0 - e for e in self.energies)
        if abs(vac - (1.0 - self.omega)) > ATOL_ENERGY:
            raise ValueError(
                f"group energies give vacuum weight {vac}, expected {1.0 - self.omega}")

    @classmethod
    def equal_split(cls, omega: float, partition: PartitionSpec) -> "StrategySpec":
        share = 1.0 - (1.0 - omega) ** (1.0 / partition.m)
        return cls(partition.n, omega, partition, tuple(share for _ in partition.group_sizes))


def entangled_state(msg: Sequence[int], omega: float) -> PureState:
    """Vacuum weight ``1 - omega``, the rest spread evenly with signs ``(-1)^(x.nu)``."""
    bits = _as_bits(msg)
    omega = _check_omega(omega)
    n = len(bits)
    dim = 2**n
    x = np.array(bits)
    # row nu of the basis-bit table, party 0 most significant
    table = (np.arange(dim)[:, None] >> np.arange(n - 1, -1, -1)[None, :]) & 1
    signs = 1.0 - 2.0 * ((table @ x) % 2)
    amps = signs * math.sqrt(omega / (dim - 1))
    amps[0] = math.sqrt(1.0 - omega)
    return PureState(n, amps)


def bipartite_state(msg: Sequence[int], omega: float, a: float) -> PureState:
    bits = _as_bits(msg)
    if len(bits) != 2:
        raise ValueError("bipartite_state needs a 2-bit message")
    x0, x1 = bits
    omega = _check_omega(omega)
    if not 0.0 <= a <= omega / 2 + 1e-15:
        raise ValueError(f"a must lie in [0, omega/2], got {a}")
    a = min(a, omega / 2)
    amps = np.array([
        math.sqrt(1.0 - omega),
        (-1) ** x1 * math.sqrt(a),
        (-1) ** x0 * math.sqrt(a),
        (-1) ** (x0 + x1) * math.sqrt(max(0.0, omega - 2 * a)),
    ])
    return PureState(2, amps)


def separable_states(msg: Sequence[int], omega: float) -> list[PureState]:
    """One qubit per party, each holding an equal share of the vacuum weight."""
    bits = _as_bits(msg)
    omega = _check_omega(omega)
    vac = (1.0 - omega) ** (1.0 / len(bits))
    c0, c1 = math.sqrt(vac), math.sqrt(max(0.0, 1.0 - vac))
    return [PureState(1, np.array([c0, (-1) ** b * c1])) for b in bits]


def group_slices(partition: PartitionSpec) -> list[slice]:
    """Party ranges of each group, groups laid out consecutively."""
    out, start = [], 0
    for k in partition.group_sizes:
        out.append(slice(start, start + k))
        start += k
    return out


def hybrid_state(msg: Sequence[int], spec: StrategySpec) -> PureState:
    bits = _as_bits(msg)
    if len(bits) != spec.n:
        raise ValueError(f"message has {len(bits)} bits, strategy has {spec.n} parties")
    factors = [entangled_state(bits[sl], e)
               for sl, e in zip(group_slices(spec.partition), spec.energies)]
    return tensor(factors)


def plus_measurement() -> BinaryMeasurement:
    """``{|+><+|, |-><-|}`` on one qubit."""
    return BinaryMeasurement(ket("+").density(), ket("-").density())
