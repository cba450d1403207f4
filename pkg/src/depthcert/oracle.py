"""Brute-force see-saw search over energy-restricted strategies.

This is an independent check on the closed forms in :mod:`depthcert.bounds`:
it never calls them.  States are optimized with measurements fixed (a
vacuum-constrained top-eigenvector problem per message) and measurements
with states fixed (a Helstrom projection per party), alternating until the
success probability stops improving.

Product structure across the groups of a partition is kept explicitly: every
message's preparation is a tensor product of one factor per group, and the
vacuum constraint ``prod_j <0|phi_j|0>^2 >= 1 - omega`` couples the factors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import PartitionSpec
from .qcore import (ATOL_UNIT, BinaryMeasurement, HermitianOp, PureState)

MU_EPS = 1e-12
MU_MAX_ITERS = 200
WEIGHT_TOL = 1e-10
HELSTROM_TOL = 1e-12
GOLDEN_ITERS = 60
MAX_N = 4

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SeesawConfig:
    n: int
    omega: float
    structure: PartitionSpec | None = None
    restarts: int = 16
    max_iters: int = 2000
    tol: float = 1e-12
    seed: int = 0

    def __post_init__(self):
        structure = self.structure or PartitionSpec((self.n,))
        if not isinstance(structure, PartitionSpec):
            structure = PartitionSpec(tuple(structure))
        object.__setattr__(self, "structure", structure)
        if structure.n != self.n:
            raise ValueError(f"structure {structure.group_sizes} does not cover {self.n} parties")
        if not 1 <= self.n <= MAX_N:
            raise ValueError(f"see-saw is limited to 1 <= n <= {MAX_N}")
        if not 0.0 <= self.omega <= 1.0:
            raise ValueError("omega must lie in [0, 1]")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.tol <= 0:
            raise ValueError("tol must be positive")


@dataclass
class SeesawReport:
    best_value: float
    per_restart_values: list[float]
    converged: bool
    iterations_used: int
    best_states: np.ndarray | None = field(default=None, repr=False)
    best_measurements: np.ndarray | None = field(default=None, repr=False)
    history: list[float] = field(default_factory=list, repr=False)


# --- constrained state step ------------------------------------------------------

def _gauge(vecs: np.ndarray) -> np.ndarray:
    # make the vacuum amplitude real and non-negative
    phase = vecs[..., :1]
    mag = np.abs(phase)
    return vecs * np.where(mag > 0, mag / np.where(mag > 0, phase, 1.0), 1.0)


def _top_vectors(mats: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Top eigenvalue and eigenvector of each matrix in a stack.

    Inside a degenerate top eigenspace the vector with the largest vacuum
    overlap is chosen.
    """
    vals, vecs = np.linalg.eigh(mats)
    top = vals[:, -1]
    scale = np.maximum(1.0, np.abs(vals).max(axis=1))
    deg = vals >= (top - 1e-12 * scale)[:, None]
    # project |0> onto the top eigenspace
    coeff = np.where(deg, vecs[:, 0, :].conj(), 0.0)
    proj = np.einsum("bij,bj->bi", vecs, coeff)
    norm = np.linalg.norm(proj, axis=1)
    out = np.where((norm > 1e-8)[:, None], proj / np.where(norm > 1e-8, norm, 1.0)[:, None],
                   vecs[:, :, -1])
    return top, _gauge(out)


def _weights(vecs: np.ndarray) -> np.ndarray:
    return np.abs(vecs[:, 0]) ** 2


def _constrained_top(scores: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Maximize <psi|S|psi> subject to |<0|psi>|^2 >= target, row by row.

    A Lagrange multiplier ``mu`` on the vacuum projector is bisected until the
    top eigenvector of ``S + mu |0><0|`` meets the target.
    """
    scores = np.asarray(scores, dtype=complex)
    B, d, _ = scores.shape
    target = np.clip(np.broadcast_to(np.asarray(target, dtype=float), (B,)), 0.0, 1.0)
    _, best = _top_vectors(scores)
    w = _weights(best)
    todo = w < target - WEIGHT_TOL
    vac = np.zeros(d)
    vac[0] = 1.0
    best[target >= 1.0 - 1e-15] = vac
    todo &= target < 1.0 - 1e-15
    if not todo.any():
        return best
    rows = np.flatnonzero(todo)
    S = scores[rows]
    v = target[rows]
    lam = np.linalg.eigvalsh(S)
    span = np.maximum(lam[:, -1] - lam[:, 0], 1e-300)
    lo = np.zeros(rows.size)
    hi = span / MU_EPS
    P0 = np.zeros((d, d))
    P0[0, 0] = 1.0
    vec_lo = best[rows]
    _, vec_hi = _top_vectors(S + hi[:, None, None] * P0)
    if np.any(_weights(vec_hi) < v - WEIGHT_TOL):
        bad = rows[_weights(vec_hi) < v - WEIGHT_TOL]
        best[bad] = _constrained_ascent(scores[bad], target[bad])
        keep = _weights(vec_hi) >= v - WEIGHT_TOL
        rows, S, v, lo, hi = rows[keep], S[keep], v[keep], lo[keep], hi[keep]
        vec_lo, vec_hi = vec_lo[keep], vec_hi[keep]
        if rows.size == 0:
            return best
    active = np.ones(rows.size, dtype=bool)
    for _ in range(MU_MAX_ITERS):
        # geometric steps while the bracket spans decades, arithmetic after
        floor = span * MU_EPS
        geo = hi > 2.0 * np.maximum(lo, floor)
        mid = np.where(geo, np.sqrt(np.maximum(lo, floor) * hi), 0.5 * (lo + hi))
        _, vm = _top_vectors(S + mid[:, None, None] * P0)
        wm = _weights(vm)
        up = wm >= v
        upd_hi = active & up
        upd_lo = active & ~up
        hi = np.where(upd_hi, mid, hi)
        lo = np.where(upd_lo, mid, lo)
        vec_hi[upd_hi] = vm[upd_hi]
        vec_lo[upd_lo] = vm[upd_lo]
        active &= ~((_weights(vec_hi) - v <= WEIGHT_TOL) | (hi - lo <= 1e-15 * np.maximum(hi, 1.0)))
        if not active.any():
            break
    w_hi = _weights(vec_hi)
    result = vec_hi.copy()
    # a jump across a level crossing: the optimum lies between the two sides
    jump = w_hi - v > WEIGHT_TOL
    if jump.any():
        result[jump] = _interpolate_weight(vec_lo[jump], vec_hi[jump], v[jump])
    best[rows] = result
    return best


def _interpolate_weight(a: np.ndarray, b: np.ndarray, v: np.ndarray) -> np.ndarray:
    # normalized cos(th) a + sin(th) b with vacuum weight just above v
    lo = np.zeros(v.size)
    hi = np.full(v.size, np.pi / 2)

    def mix(th):
        m = np.cos(th)[:, None] * a + np.sin(th)[:, None] * b
        return m / np.linalg.norm(m, axis=1)[:, None]

    for _ in range(100):
        mid = 0.5 * (lo + hi)
        ok = _weights(mix(mid)) >= v
        hi = np.where(ok, mid, hi)
        lo = np.where(ok, lo, mid)
    return _gauge(mix(hi))


def _constrained_ascent(scores: np.ndarray, target: np.ndarray,
                        iters: int = 20000, tol: float = 1e-13) -> np.ndarray:
    """Fallback: Riemannian gradient ascent on the saturated set.

    ``psi = sqrt(v)|0> + sqrt(1 - v) chi`` with ``chi`` a unit vector orthogonal
    to ``|0>``; the constrained optimum saturates whenever the unconstrained
    one is infeasible.
    """
    out = []
    for S, v in zip(scores, target):
        d = S.shape[0]
        A = S[1:, 1:]
        bvec = S[1:, 0]
        c = math.sqrt(v * (1.0 - v))
        lip = 2.0 * (1.0 - v) * np.abs(np.linalg.eigvalsh(A)).max() + 2.0 * c * np.linalg.norm(bvec) + 1e-12
        chi = bvec.copy() if np.linalg.norm(bvec) > 1e-12 else np.linalg.eigh(A)[1][:, -1].astype(complex)
        chi /= np.linalg.norm(chi)
        for _ in range(iters):
            grad = 2.0 * (1.0 - v) * (A @ chi) + 2.0 * c * bvec
            grad_t = grad - np.vdot(chi, grad).real * chi
            if np.linalg.norm(grad_t) < tol:
                break
            chi = chi + grad_t / lip
            chi /= np.linalg.norm(chi)
        psi = np.zeros(d, dtype=complex)
        psi[0] = math.sqrt(v)
        psi[1:] = math.sqrt(1.0 - v) * chi
        out.append(psi)
    return np.array(out)


def optimal_state_given_measurements(score_op: HermitianOp, omega: float) -> PureState:
    """Best unit vector for ``<psi|score_op|psi>`` with non-vacuum weight at most ``omega``."""
    if not 0.0 <= omega <= 1.0:
        raise ValueError("omega must lie in [0, 1]")
    vec = _constrained_top(score_op.entries[None], np.array([1.0 - omega]))[0]
    return PureState.from_vector(vec)


# --- measurement step ------------------------------------------------------------

def _helstrom(diff: np.ndarray) -> np.ndarray:
    """Projector onto the strictly positive eigenspace of each 2x2 matrix."""
    vals, vecs = np.linalg.eigh(diff)
    scale = np.maximum(1.0, np.abs(vals).max(axis=1, keepdims=True))
    pos = (vals > HELSTROM_TOL * scale).astype(float)
    return np.einsum("bik,bk,bjk->bij", vecs, pos, vecs.conj())


def optimal_measurement_given_states(effective_pair) -> BinaryMeasurement:
    """Helstrom measurement for the pair ``(E0, E1)``; ties go to outcome 1."""
    e0, e1 = effective_pair
    m0 = e0.entries if isinstance(e0, HermitianOp) else np.asarray(e0, dtype=complex)
    m1 = e1.entries if isinstance(e1, HermitianOp) else np.asarray(e1, dtype=complex)
    if m0.shape != m1.shape:
        raise ValueError("effective operators differ in dimension")
    diff = m0 - m1
    if not np.allclose(diff, diff.conj().T, rtol=0, atol=ATOL_UNIT):
        raise ValueError("effective operators must be Hermitian")
    d = diff.shape[0]
    vals, vecs = np.linalg.eigh(diff)
    scale = max(1.0, float(np.abs(vals).max()))
    pos = vals > HELSTROM_TOL * scale
    proj = vecs[:, pos] @ vecs[:, pos].conj().T
    proj = 0.5 * (proj + proj.conj().T)
    return BinaryMeasurement(HermitianOp(proj), HermitianOp(np.eye(d) - proj))


# --- the see-saw -----------------------------------------------------------------

class _Problem:
    """Index bookkeeping shared by every restart."""

    def __init__(self, n: int, structure: PartitionSpec):
        self.n = n
        self.B = 2**n
        self.msgs = np.array([[(x >> (n - 1 - i)) & 1 for i in range(n)]
                              for x in range(self.B)])
        self.groups = []
        start = 0
        for k in structure.group_sizes:
            self.groups.append(list(range(start, start + k)))
            start += k

    def local_ops(self, meas: np.ndarray) -> list[np.ndarray]:
        """Per party, the (B, 2, 2) stack of the element each message needs."""
        # meas[i] is party i's outcome-0 projector
        out = []
        for i in range(self.n):
            pair = np.stack([meas[i], np.eye(2) - meas[i]])
            out.append(pair[self.msgs[:, i]])
        return out

    def group_scores(self, ops: list[np.ndarray], j: int) -> np.ndarray:
        S = ops[self.groups[j][0]]
        for i in self.groups[j][1:]:
            S = np.einsum("bij,bkl->bikjl", S, ops[i]).reshape(
                self.B, S.shape[1] * 2, S.shape[2] * 2)
        return S

    def full_states(self, factors: list[np.ndarray]) -> np.ndarray:
        psi = factors[0]
        for f in factors[1:]:
            psi = np.einsum("bi,bj->bij", psi, f).reshape(self.B, -1)
        return psi


def _expect(S: np.ndarray, phi: np.ndarray) -> np.ndarray:
    return np.einsum("bi,bij,bj->b", phi.conj(), S, phi).real


def _value(prob: _Problem, factors: list[np.ndarray], meas: np.ndarray) -> float:
    ops = prob.local_ops(meas)
    total = np.ones(prob.B)
    for j, f in enumerate(factors):
        total = total * _expect(prob.group_scores(ops, j), f)
    return float(total.mean())


def _measurement_step(prob: _Problem, factors: list[np.ndarray], meas: np.ndarray) -> np.ndarray:
    psi = prob.full_states(factors)
    meas = meas.copy()
    n, B = prob.n, prob.B
    for i in range(n):
        ops = prob.local_ops(meas)
        t = psi.reshape((B,) + (2,) * n)
        phi = t
        for k in range(n):
            if k == i:
                continue
            phi = np.moveaxis(np.einsum("bij,b...j->b...i", ops[k], np.moveaxis(phi, 1 + k, -1)), -1, 1 + k)
        Psi = np.moveaxis(t, 1 + i, 1).reshape(B, 2, -1)
        Phi = np.moveaxis(phi, 1 + i, 1).reshape(B, 2, -1)
        E = np.einsum("bak,bck->bac", Phi, Psi.conj())
        bit = prob.msgs[:, i]
        diff = E[bit == 0].sum(axis=0) - E[bit == 1].sum(axis=0)
        diff = 0.5 * (diff + diff.conj().T)
        meas[i] = _helstrom(diff[None])[0]
    return meas


def _chi_split(S: np.ndarray, phi: np.ndarray):
    """Split each factor into vacuum weight and a rephased orthogonal direction."""
    B, d = phi.shape
    chi = phi.copy()
    chi[:, 0] = 0.0
    norm = np.linalg.norm(chi, axis=1)
    # factors sitting on the vacuum get the direction S|0> pushes toward
    fallback = S[:, :, 0].copy()
    fallback[:, 0] = 0.0
    fnorm = np.linalg.norm(fallback, axis=1)
    generic = np.zeros((B, d), dtype=complex)
    generic[:, 1] = 1.0
    fallback = np.where((fnorm > 1e-14)[:, None], fallback / np.where(fnorm > 1e-14, fnorm, 1.0)[:, None], generic)
    chi = np.where((norm > 1e-14)[:, None], chi / np.where(norm > 1e-14, norm, 1.0)[:, None], fallback)
    cross = np.einsum("bj,bj->b", S[:, 0, :], chi)
    phase = np.where(np.abs(cross) > 0, np.abs(cross) / np.where(np.abs(cross) > 0, cross, 1.0), 1.0)
    chi = chi * phase[:, None]
    a = S[:, 0, 0].real
    b = _expect(S, chi)
    c = np.abs(cross)
    return chi, a, b, c


def _s_of_t(t, a, b, c):
    u = np.exp(-t)
    return u * a + (1.0 - u) * b + 2.0 * np.sqrt(np.clip(u * (1.0 - u), 0.0, None)) * c


def _reallocate(prob: _Problem, ops: list[np.ndarray], factors: list[np.ndarray],
                budget: float) -> list[np.ndarray]:
    """Move vacuum weight between groups with each factor's direction frozen."""
    m = len(factors)
    B = prob.B
    parts = [_chi_split(prob.group_scores(ops, j), factors[j]) for j in range(m)]
    t_cur = np.stack([-np.log(np.clip(np.abs(f[:, 0]) ** 2, 1e-300, 1.0)) for f in factors], axis=1)
    # best unconstrained vacuum weight of each 2x2 reduced problem
    t_star = np.empty((B, m))
    for j, (_, a, b, c) in enumerate(parts):
        mats = np.stack([np.stack([a, c], -1), np.stack([c, b], -1)], 1)
        _, vecs = np.linalg.eigh(mats)
        u_star = np.clip(vecs[:, 0, -1] ** 2, 1e-300, 1.0)
        t_star[:, j] = -np.log(u_star)

    def objective(t):
        return sum(np.log(np.clip(_s_of_t(t[:, j], *parts[j][1:]), 1e-300, None)) for j in range(m))

    t = np.minimum(t_cur, t_star)
    free = t_star.sum(axis=1) <= budget
    slack = budget - t.sum(axis=1)
    room = (t_star - t).sum(axis=1)
    lam = np.where(free, 1.0, np.clip(slack / np.where(room > 0, room, 1.0), 0.0, 1.0))
    t = t + lam[:, None] * (t_star - t)
    t = np.where(free[:, None], t_star, t)
    if m > 1:
        for _sweep in range(2 if m > 2 else 1):
            for j in range(m):
                for l in range(j + 1, m):
                    pair = t[:, j] + t[:, l]
                    lo = np.maximum(0.0, pair - t_star[:, l])
                    hi = np.minimum(pair, t_star[:, j])
                    hi = np.maximum(hi, lo)

                    pj, pl = parts[j][1:], parts[l][1:]

                    def f(x):
                        return (np.log(np.clip(_s_of_t(x, *pj), 1e-300, None))
                                + np.log(np.clip(_s_of_t(pair - x, *pl), 1e-300, None)))

                    a_, b_ = lo.copy(), hi.copy()
                    for _ in range(GOLDEN_ITERS):
                        x1 = b_ - _INVPHI * (b_ - a_)
                        x2 = a_ + _INVPHI * (b_ - a_)
                        left = f(x1) >= f(x2)
                        b_ = np.where(left, x2, b_)
                        a_ = np.where(left, a_, x1)
                    cand = t.copy()
                    xbest = 0.5 * (a_ + b_)
                    cand[:, j] = xbest
                    cand[:, l] = pair - xbest
                    better = objective(cand) > objective(t)
                    t = np.where(better[:, None], cand, t)
    # never lose ground against the incoming split
    old = objective(np.minimum(t_cur, 1e300))
    keep = objective(t) < old
    t = np.where(keep[:, None], t_cur, t)
    out = []
    for j, (chi, *_r) in enumerate(parts):
        u = np.exp(-t[:, j])
        phi = np.sqrt(1.0 - u)[:, None] * chi
        phi[:, 0] = np.sqrt(u)
        out.append(np.where(keep[:, None], factors[j], phi))
    return out


def _state_step(prob: _Problem, factors: list[np.ndarray], meas: np.ndarray,
                omega: float) -> list[np.ndarray]:
    ops = prob.local_ops(meas)
    vac_total = 1.0 - omega
    factors = [f.copy() for f in factors]
    m = len(factors)
    if m == 1:
        factors[0] = _constrained_top(prob.group_scores(ops, 0), np.full(prob.B, vac_total))
        return factors
    for j in range(m):
        others = np.ones(prob.B)
        for l in range(m):
            if l != j:
                others = others * np.abs(factors[l][:, 0]) ** 2
        target = np.clip(vac_total / np.where(others > 0, others, 1e-300), 0.0, 1.0)
        S = prob.group_scores(ops, j)
        new = _constrained_top(S, target)
        # keep the factor unless the eigen step is a strict improvement
        better = _expect(S, new) >= _expect(S, factors[j])
        factors[j] = np.where(better[:, None], new, factors[j])
    budget = -math.log(vac_total) if vac_total > 0 else math.inf
    if math.isfinite(budget):
        factors = _reallocate(prob, ops, factors, budget)
    return factors


def _random_start(prob: _Problem, omega: float, rng: np.random.Generator) -> list[np.ndarray]:
    m = len(prob.groups)
    budget = -math.log(1.0 - omega) if omega < 1.0 else 50.0
    split = rng.dirichlet(np.ones(m), size=prob.B) * budget
    factors = []
    for j, g in enumerate(prob.groups):
        d = 2 ** len(g)
        z = rng.normal(size=(prob.B, d)) + 1j * rng.normal(size=(prob.B, d))
        z[:, 0] = 0.0
        if d > 1:
            z /= np.linalg.norm(z, axis=1)[:, None]
        u = np.exp(-split[:, j])
        phi = np.sqrt(1.0 - u)[:, None] * z
        phi[:, 0] = np.sqrt(u)
        factors.append(phi)
    return factors


def _run_restart(prob: _Problem, cfg: SeesawConfig, rng: np.random.Generator):
    factors = _random_start(prob, cfg.omega, rng)
    meas = np.zeros((prob.n, 2, 2), dtype=complex)
    # random projective start; the first step replaces it anyway
    for i in range(prob.n):
        z = rng.normal(size=2) + 1j * rng.normal(size=2)
        z /= np.linalg.norm(z)
        meas[i] = np.outer(z, z.conj())
    meas = _measurement_step(prob, factors, meas)
    history = [_value(prob, factors, meas)]
    converged = False
    it = 0
    for it in range(1, cfg.max_iters + 1):
        new_factors = _state_step(prob, factors, meas, cfg.omega)
        new_meas = _measurement_step(prob, new_factors, meas)
        val = _value(prob, new_factors, new_meas)
        if val < history[-1]:
            # round-off in the multiplier search; keep the better iterate
            converged = True
            break
        factors, meas = new_factors, new_meas
        history.append(val)
        if val - history[-2] <= cfg.tol * max(abs(history[-2]), 1e-300):
            converged = True
            break
    return history[-1], converged, it, factors, meas, history


def seesaw(config: SeesawConfig) -> SeesawReport:
    """Best success found by alternating optimization from random starts."""
    prob = _Problem(config.n, config.structure)
    seeds = np.random.SeedSequence(config.seed).spawn(config.restarts)
    values, best = [], None
    all_converged, iters = True, 0
    for ss in seeds:
        val, conv, it, factors, meas, hist = _run_restart(prob, config, np.random.default_rng(ss))
        values.append(val)
        all_converged &= conv
        iters = max(iters, it)
        if best is None or val > best[0]:
            best = (val, prob.full_states(factors), meas, hist)
    return SeesawReport(
        best_value=max(values),
        per_restart_values=values,
        converged=all_converged,
        iterations_used=iters,
        best_states=best[1],
        best_measurements=best[2],
        history=best[3],
    )
