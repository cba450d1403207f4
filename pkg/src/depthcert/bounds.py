"""Closed-form success-probability bounds and the partition optimizer.

All bounds are for the distributed discrimination game: a source encodes an
n-bit message into an n-qubit state with non-vacuum weight at most ``omega``
and party ``i`` has to guess bit ``i``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

MAX_ENUM_N = 12
RESTARTS = 16
PGD_TOL = 1e-10
PGD_MAX_ITERS = 10_000
RESTART_AGREE_TOL = 1e-9


def _check_omega(omega: float) -> float:
    omega = float(omega)
    if not 0.0 <= omega <= 1.0:
        raise ValueError(f"omega must lie in [0, 1], got {omega}")
    return omega


@dataclass(frozen=True)
class PartitionSpec:
    """Multiset of group sizes; stored non-increasing."""

    group_sizes: tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(int(k) for k in self.group_sizes)
        if not sizes or any(k < 1 for k in sizes):
            raise ValueError(f"invalid group sizes {self.group_sizes!r}")
        object.__setattr__(self, "group_sizes", tuple(sorted(sizes, reverse=True)))

    @classmethod
    def parse(cls, text: str) -> "PartitionSpec":
        """Parse ``"1,3"`` (commas) or ``"1|3"`` (bars)."""
        parts = text.replace("|", ",").split(",")
        try:
            return cls(tuple(int(p) for p in parts))
        except ValueError as exc:
            raise ValueError(f"cannot parse partition {text!r}") from exc

    @property
    def n(self) -> int:
        return sum(self.group_sizes)

    @property
    def m(self) -> int:
        return len(self.group_sizes)

    @property
    def max_group(self) -> int:
        return self.group_sizes[0]

    def label(self) -> str:
        """``"1|3"`` style label, ascending group sizes."""
        return "|".join(str(k) for k in sorted(self.group_sizes))

    def refines(self, other: "PartitionSpec") -> bool:
        """True if ``self`` can be obtained by splitting the groups of ``other``."""
        if self.n != other.n:
            return False
        return _can_split(tuple(other.group_sizes), tuple(sorted(self.group_sizes, reverse=True)))


def _can_split(coarse: tuple[int, ...], fine: tuple[int, ...]) -> bool:
    # assign every fine part to a coarse bin of exactly matching total
    if not fine:
        return all(c == 0 for c in coarse)
    k, rest = fine[0], fine[1:]
    tried = set()
    for i, c in enumerate(coarse):
        if c >= k and c not in tried:
            tried.add(c)
            if _can_split(coarse[:i] + (c - k,) + coarse[i + 1:], rest):
                return True
    return False


@dataclass(frozen=True)
class PartitionBoundResult:
    value: float
    energies: tuple[float, ...]
    restarts_agree: bool


def p_sd(omega: float, n_states: int) -> float:
    """Best energy-restricted success for discriminating ``n_states`` pure states."""
    omega = _check_omega(omega)
    if n_states < 2:
        raise ValueError("n_states must be at least 2")
    if omega >= 1.0 - 1.0 / n_states:
        return 1.0
    val = (math.sqrt(omega * (n_states - 1)) + math.sqrt(1.0 - omega)) ** 2 / n_states
    return min(1.0, val)


def p_ent(omega: float, n_parties: int) -> float:
    """Optimal success over all (possibly entangled) preparations."""
    if n_parties < 1:
        raise ValueError("n_parties must be positive")
    return p_sd(omega, 2**n_parties)


def p_sep(omega: float, n_parties: int) -> float:
    """Optimal success over fully product preparations."""
    omega = _check_omega(omega)
    if n_parties < 1:
        raise ValueError("n_parties must be positive")
    vac = (1.0 - omega) ** (1.0 / n_parties)
    if vac <= 0.5:
        # each party can spend its share up to |+>, so unused energy is free
        return 1.0
    factor = 0.5 + math.sqrt(vac) * math.sqrt(max(0.0, 1.0 - vac))
    return min(1.0, factor**n_parties)


def g_bounds(p_s: float, n_states: int) -> tuple[float, float]:
    """Both energies at which ``p_sd(omega, n_states) == p_s``.

    Returns ``(g_minus, g_plus)``; ``g_minus`` inverts ``p_sd`` on the rising
    branch ``[0, 1 - 1/n]`` and is the one relevant for certification.
    """
    n = int(n_states)
    if n < 2:
        raise ValueError("n_states must be at least 2")
    if not 1.0 / n - 1e-15 <= p_s <= 1.0 + 1e-15:
        raise ValueError(f"p_s must lie in [1/n, 1], got {p_s}")
    p = min(max(p_s, 1.0 / n), 1.0)
    centre = 1.0 + (n - 2) * p
    spread = 2.0 * math.sqrt(max(0.0, p * (1.0 - p) * (n - 1)))
    return (centre - spread) / n, (centre + spread) / n


def nu_crit(omega: float, n_parties: int) -> float:
    """White-noise visibility at which the optimal entangled strategy drops to ``p_sep``."""
    omega = float(omega)
    sat = 1.0 - 2.0**-n_parties
    if not 0.0 < omega < sat:
        raise ValueError(f"nu_crit needs 0 < omega < {sat}, got {omega}")
    floor = 2.0**-n_parties
    return (p_sep(omega, n_parties) - floor) / (p_ent(omega, n_parties) - floor)


def partitions(n: int, max_part: int | None = None) -> Iterator[PartitionSpec]:
    """All integer partitions of ``n`` (non-increasing), largest first."""
    if n < 1:
        raise ValueError("n must be positive")
    max_part = n if max_part is None else min(max_part, n)

    def rec(rem: int, cap: int) -> Iterator[tuple[int, ...]]:
        if rem == 0:
            yield ()
            return
        for k in range(min(rem, cap), 0, -1):
            for tail in rec(rem - k, k):
                yield (k,) + tail

    for sizes in rec(n, max_part):
        yield PartitionSpec(sizes)


# --- partition optimizer -------------------------------------------------------
#
# Maximize sum_j log p_ent(1 - exp(-t_j), k_j) over t on the scaled simplex
# {t >= 0, sum t = -ln(1 - omega)}.  Rows of a (R, m) array are independent
# restarts, advanced together.

def _log_pent_and_grad(t: np.ndarray, ks: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    N = 2.0**ks
    omega = -np.expm1(-t)
    sat = omega >= 1.0 - 1.0 / N
    value_s = np.sqrt(omega * (N - 1)) + np.sqrt(np.clip(1.0 - omega, 0.0, None))
    logp = np.where(sat, 0.0, 2.0 * np.log(value_s) - np.log(N))
    # the slope diverges at omega = 0; floor it so boundary restarts can move
    w = np.clip(omega, 1e-14, None)
    b = np.sqrt(np.clip(1.0 - w, 0.0, None))
    s = np.sqrt(w * (N - 1)) + b
    # d/dw log p = (sqrt(N-1)/sqrt(w) - 1/sqrt(1-w)) / s ; dw/dt = 1 - w
    with np.errstate(divide="ignore", invalid="ignore"):
        dlogp_dw = (np.sqrt(N - 1) / np.sqrt(w) - 1.0 / np.where(b > 0, b, np.inf)) / s
    grad = np.where(sat, 0.0, dlogp_dw * (1.0 - w))
    return logp, grad


def project_simplex(v: np.ndarray, total: float) -> np.ndarray:
    """Euclidean projection of each row of ``v`` onto ``{x >= 0, sum x = total}``."""
    v = np.asarray(v, dtype=float)
    if v.ndim == 1:
        return project_simplex(v[None, :], total)[0]
    m = v.shape[1]
    u = -np.sort(-v, axis=1)
    css = np.cumsum(u, axis=1) - total
    idx = np.arange(1, m + 1)
    cond = u - css / idx > 0
    rho = m - 1 - np.argmax(cond[:, ::-1], axis=1)
    theta = css[np.arange(v.shape[0]), rho] / (rho + 1)
    return np.maximum(v - theta[:, None], 0.0)


def _pgd(t0: np.ndarray, ks: np.ndarray, total: float,
         tol: float = PGD_TOL, max_iters: int = PGD_MAX_ITERS) -> tuple[np.ndarray, np.ndarray]:
    """Projected gradient ascent with per-row backtracking step sizes."""
    t = t0.copy()
    R = t.shape[0]
    f, g = _log_pent_and_grad(t, ks)
    F = f.sum(axis=1)
    step = np.full(R, max(total, 1e-3))
    active = np.ones(R, dtype=bool)
    for _ in range(max_iters):
        if not active.any():
            break
        rows = np.flatnonzero(active)
        tr, gr, Fr, sr = t[rows], g[rows], F[rows], step[rows]
        # backtracking: halve until the Armijo condition holds on the projected step
        accepted = np.zeros(rows.size, dtype=bool)
        t_new, F_new = tr.copy(), Fr.copy()
        for _bt in range(100):
            cand = project_simplex(tr + sr[:, None] * gr, total)
            Fc = _log_pent_and_grad(cand, ks)[0].sum(axis=1)
            ascent = np.einsum("ij,ij->i", gr, cand - tr)
            take = (Fc >= Fr + 1e-4 * ascent - 1e-15) & ~accepted
            t_new[take], F_new[take] = cand[take], Fc[take]
            accepted |= take
            if accepted.all():
                break
            sr = np.where(accepted, sr, sr * 0.5)
        gmap = np.linalg.norm(t_new - tr, axis=1) / sr
        fn, gn = _log_pent_and_grad(t_new, ks)
        # Barzilai-Borwein trial step for the next iteration (ascent: curvature < 0)
        dt, dg = t_new - tr, gn - gr
        curv = np.einsum("ij,ij->i", dt, dg)
        with np.errstate(divide="ignore", invalid="ignore"):
            bb = np.einsum("ij,ij->i", dt, dt) / -curv
        bb = np.where((curv < 0) & np.isfinite(bb), np.clip(bb, 1e-12, 1e6), sr * 2.0)
        t[rows], F[rows], g[rows] = t_new, fn.sum(axis=1), gn
        step[rows] = np.where(accepted, bb, sr)
        done = (gmap <= tol) | ~accepted | (np.abs(F_new - Fr) <= 1e-16)
        active[rows[done]] = False
    return t, F


def _saturation_split(ks: Sequence[int], total: float) -> np.ndarray | None:
    # every group can be driven to success 1 at once
    need = np.array([k * math.log(2.0) for k in ks])
    if need.sum() <= total + 1e-15:
        return need + (total - need.sum()) / len(ks)
    return None


def partition_bound(omega: float, spec: PartitionSpec, restarts: int = RESTARTS,
                    seed: int = 0) -> PartitionBoundResult:
    """Best success for preparations that are product across the groups of ``spec``."""
    omega = _check_omega(omega)
    if not isinstance(spec, PartitionSpec):
        spec = PartitionSpec(tuple(spec))
    n = spec.n
    if omega == 1.0:
        return PartitionBoundResult(1.0, tuple(1.0 for _ in spec.group_sizes), True)
    if spec.m == 1:
        return PartitionBoundResult(p_ent(omega, n), (omega,), True)
    total = -math.log1p(-omega)
    ks = np.array(spec.group_sizes, dtype=float)
    sat = _saturation_split(spec.group_sizes, total)
    if sat is not None:
        energies = tuple(float(-np.expm1(-t)) for t in sat)
        return PartitionBoundResult(1.0, energies, True)
    if total == 0.0:
        return PartitionBoundResult(2.0**-n, tuple(0.0 for _ in spec.group_sizes), True)
    rng = np.random.default_rng(seed)
    t0 = rng.dirichlet(np.ones(spec.m), size=restarts) * total
    t, F = _pgd(t0, ks, total)
    values = np.exp(F)
    best = int(np.argmax(values))
    agree = bool(values.max() - values.min() <= RESTART_AGREE_TOL)
    energies = tuple(float(-np.expm1(-tj)) for tj in t[best])
    return PartitionBoundResult(float(values[best]), energies, agree)


def equal_group_bound(omega: float, k: int, m: int) -> float:
    """Closed form for ``m`` groups of ``k`` parties each.

    Each group carries the same vacuum share, ``1 - omega_j = (1 - omega)**(1/m)``.
    """
    omega = _check_omega(omega)
    group_omega = 1.0 - (1.0 - omega) ** (1.0 / m)
    return p_ent(group_omega, k) ** m


@lru_cache(maxsize=4096)
def _cached_partition_value(omega: float, sizes: tuple[int, ...]) -> float:
    return partition_bound(omega, PartitionSpec(sizes)).value


def depth_bound_table(omega: float, n: int, max_n: int = MAX_ENUM_N) -> dict[int, float]:
    """Map depth ``d`` to the best bound over partitions whose groups are all ``<= d``."""
    omega = _check_omega(omega)
    if n < 1:
        raise ValueError("n must be positive")
    if n > max_n:
        raise ValueError(f"n = {n} exceeds the enumeration cap {max_n}")
    best_by_max: dict[int, float] = {}
    for spec in partitions(n):
        val = _cached_partition_value(omega, spec.group_sizes)
        best_by_max[spec.max_group] = max(best_by_max.get(spec.max_group, 0.0), val)
    table, running = {}, 0.0
    for d in range(1, n + 1):
        running = max(running, best_by_max.get(d, 0.0))
        table[d] = running
    return table
