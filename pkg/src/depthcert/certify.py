"""Entanglement-depth verdicts from an observed success probability."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import bounds
from .bounds import PartitionSpec

CONSISTENCY_TOL = 1e-9


class InconsistentObservation(ValueError):
    """Observed success exceeds what any energy-restricted quantum source allows."""


@dataclass(frozen=True)
class CertVerdict:
    n: int
    omega: float
    observed_ps: float
    excluded_partitions: tuple[tuple[PartitionSpec, float], ...]
    depth_lower_bound: int
    gme: bool

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "omega": self.omega,
            "observed_ps": self.observed_ps,
            "excluded_partitions": [
                {"partition": list(sorted(p.group_sizes)), "label": p.label(), "bound": b}
                for p, b in self.excluded_partitions
            ],
            "depth_lower_bound": self.depth_lower_bound,
            "gme": self.gme,
        }


@dataclass(frozen=True)
class BoundCurve:
    name: str
    omegas: tuple[float, ...]
    values: tuple[float, ...]


def certify(n: int, omega: float, observed_ps: float, margin: float = 0.0) -> CertVerdict:
    """Partitions ruled out by ``observed_ps`` and the certified entanglement depth.

    A partition is excluded when its bound lies strictly below
    ``observed_ps - margin``.  Depth ``d`` is certified when ``observed_ps``
    beats every partition whose groups all have fewer than ``d`` parties.
    """
    if n < 2:
        raise ValueError("certification needs at least two parties")
    if not 0.0 <= omega <= 1.0:
        raise ValueError(f"omega must lie in [0, 1], got {omega}")
    if not 0.0 <= observed_ps <= 1.0:
        raise ValueError(f"observed_ps must lie in [0, 1], got {observed_ps}")
    if margin < 0:
        raise ValueError("margin must be non-negative")
    ceiling = bounds.p_ent(omega, n)
    if observed_ps > ceiling + CONSISTENCY_TOL:
        raise InconsistentObservation(
            f"observed success {observed_ps} exceeds the quantum bound {ceiling} "
            f"for n = {n}, omega = {omega}")
    if n > bounds.MAX_ENUM_N:
        raise ValueError(f"n = {n} exceeds the enumeration cap {bounds.MAX_ENUM_N}")

    threshold = observed_ps - margin
    excluded = []
    best_by_max: dict[int, float] = {}
    for spec in bounds.partitions(n):
        val = bounds._cached_partition_value(omega, spec.group_sizes)
        best_by_max[spec.max_group] = max(best_by_max.get(spec.max_group, 0.0), val)
        if val < threshold:
            excluded.append((spec, val))

    depth, running = 1, 0.0
    for d in range(1, n):
        running = max(running, best_by_max.get(d, 0.0))
        if threshold > running:
            depth = d + 1
        else:
            break
    return CertVerdict(n, float(omega), float(observed_ps), tuple(excluded), depth, depth == n)


def sweep(n: int, omega_grid: Sequence[float],
          partitions: Sequence[PartitionSpec] | None = None) -> list[BoundCurve]:
    """Bound curves on ``omega_grid``: entangled, each partition, fully separable.

    ``partitions`` defaults to every non-trivial, non-singleton partition of n,
    ordered from coarse to fine.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if n > bounds.MAX_ENUM_N:
        raise ValueError(f"n = {n} exceeds the enumeration cap {bounds.MAX_ENUM_N}")
    grid = tuple(float(w) for w in omega_grid)
    for w in grid:
        if not 0.0 <= w <= 1.0:
            raise ValueError(f"omega {w} outside [0, 1]")
    if partitions is None:
        partitions = default_partitions(n)
    curves = [BoundCurve("p_ent", grid, tuple(bounds.p_ent(w, n) for w in grid))]
    for spec in partitions:
        if spec.n != n:
            raise ValueError(f"partition {spec.label()} does not cover {n} parties")
        if spec.m == 1 or spec.max_group == 1:
            continue
        vals = tuple(bounds._cached_partition_value(w, spec.group_sizes) for w in grid)
        curves.append(BoundCurve(f"p_{{{spec.label()}}}", grid, vals))
    curves.append(BoundCurve("p_sep", grid, tuple(bounds.p_sep(w, n) for w in grid)))
    return curves


def default_partitions(n: int) -> list[PartitionSpec]:
    """Intermediate partitions, coarsest first and larger biggest-group first."""
    specs = [p for p in bounds.partitions(n) if p.m > 1 and p.max_group > 1]
    return sorted(specs, key=lambda p: (p.m, -p.max_group))
