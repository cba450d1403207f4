"""Success probability of the distributed discrimination game."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy import optimize

from . import constructions as cons
from .bounds import PartitionSpec
from .qcore import BinaryMeasurement, HermitianOp, PureState, apply_local

SCAN_GRID = 1000
SCAN_XTOL = 1e-9


@dataclass(frozen=True)
class NoiseModel:
    """White noise ``rho -> v rho + (1 - v) 1 / 2**n``."""

    visibility: float

    def __post_init__(self):
        if not 0.0 <= self.visibility <= 1.0:
            raise ValueError(f"visibility must lie in [0, 1], got {self.visibility}")


@dataclass(frozen=True, eq=False)
class Strategy:
    """Preparations for every message plus one local measurement per party.

    ``states`` maps each n-bit message tuple to a :class:`PureState` or a
    density operator (:class:`HermitianOp` of dimension ``2**n``).
    """

    states: Mapping[tuple[int, ...], PureState | HermitianOp]
    measurements: Sequence[BinaryMeasurement]
    n: int = field(init=False)

    def __post_init__(self):
        n = len(self.measurements)
        if n < 1:
            raise ValueError("need at least one measurement")
        for m in self.measurements:
            if m.element0.dim != 2:
                raise ValueError("each party measures a single qubit")
        expected = set(cons.messages(n))
        keys = {tuple(int(b) for b in k) for k in self.states}
        if keys != expected:
            raise ValueError(f"states must cover all {2**n} messages of {n} bits")
        for s in self.states.values():
            if s.dim != 2**n:
                raise ValueError(f"state dimension {s.dim} does not match {n} parties")
        object.__setattr__(self, "states", {tuple(int(b) for b in k): v
                                            for k, v in self.states.items()})
        object.__setattr__(self, "measurements", tuple(self.measurements))
        object.__setattr__(self, "n", n)

    @classmethod
    def entangled(cls, n: int, omega: float) -> "Strategy":
        return cls({x: cons.entangled_state(x, omega) for x in cons.messages(n)},
                   [cons.plus_measurement()] * n)

    @classmethod
    def separable(cls, n: int, omega: float) -> "Strategy":
        from .qcore import tensor
        return cls({x: tensor(cons.separable_states(x, omega)) for x in cons.messages(n)},
                   [cons.plus_measurement()] * n)

    @classmethod
    def hybrid(cls, spec: cons.StrategySpec) -> "Strategy":
        return cls({x: cons.hybrid_state(x, spec) for x in cons.messages(spec.n)},
                   [cons.plus_measurement()] * spec.n)

    @classmethod
    def bipartite(cls, omega: float, a: float) -> "Strategy":
        return cls({x: cons.bipartite_state(x, omega, a) for x in cons.messages(2)},
                   [cons.plus_measurement()] * 2)


def _success_term(state: PureState | HermitianOp, ops: list[np.ndarray]) -> float:
    if isinstance(state, PureState):
        psi = state.amplitudes
        return float(np.vdot(psi, apply_local(psi, ops)).real)
    # rho (x) M: apply the local ops on the ket side of every column
    rho = state.entries
    applied = apply_local(rho.T, ops).T
    return float(np.trace(applied).real)


def born_success(strategy: Strategy) -> float:
    """Average probability that every party outputs its own bit."""
    n = strategy.n
    total = 0.0
    for x, state in strategy.states.items():
        ops = [strategy.measurements[i][x[i]].entries for i in range(n)]
        total += _success_term(state, ops)
    return total / 2**n


def noisy_success(strategy: Strategy, noise: NoiseModel) -> float:
    """Success after mixing every preparation with white noise."""
    v = noise.visibility
    n = strategy.n
    dim = 2**n
    mixed = {}
    for x, state in strategy.states.items():
        rho = state.density().entries if isinstance(state, PureState) else state.entries
        mixed[x] = HermitianOp(v * rho + (1.0 - v) * np.eye(dim) / dim)
    return born_success(Strategy(mixed, strategy.measurements))


def _bipartite_success(omega: float, a: float) -> float:
    return born_success(Strategy.bipartite(omega, a))


def scan_a(omega: float, grid: int = SCAN_GRID) -> tuple[float, float]:
    """Best weight ``a`` on the single-excitation components of the two-party family.

    A uniform grid on ``[0, omega/2]`` locates the peak, which golden-section
    search then narrows to ``SCAN_XTOL``.
    """
    if grid < 3:
        raise ValueError("grid must have at least 3 points")
    hi = omega / 2
    if hi == 0.0:
        return 0.0, _bipartite_success(omega, 0.0)
    a_grid = np.linspace(0.0, hi, grid)
    vals = np.array([_bipartite_success(omega, a) for a in a_grid])
    i = int(np.argmax(vals))
    if i in (0, grid - 1):
        return float(a_grid[i]), float(vals[i])
    res = optimize.minimize_scalar(
        lambda a: -_bipartite_success(omega, min(max(a, 0.0), hi)),
        bracket=(a_grid[i - 1], a_grid[i], a_grid[i + 1]),
        method="golden", options={"xtol": SCAN_XTOL / max(a_grid[i], 1e-300)})
    a_star = float(min(max(res.x, 0.0), hi))
    return a_star, _bipartite_success(omega, a_star)
