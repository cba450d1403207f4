"""Dense linear algebra on n-qubit tensor-product spaces.

Basis convention: party 0 is the most significant bit of the
computational-basis index, so ``|x_0 x_1 ... x_{n-1}>`` sits at index
``sum_i x_i 2^(n-1-i)``.  Every module in the package relies on this.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

ATOL_UNIT = 1e-12
ATOL_EIG = 1e-10
ATOL_PSD = 1e-10


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def _n_qubits(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 1 or 2**n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


@dataclass(frozen=True, eq=False)
class PureState:
    """Unit vector on ``n_parties`` qubits."""

    n_parties: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen(np.ravel(self.amplitudes))
        if self.n_parties < 1:
            raise ValueError("n_parties must be positive")
        if amps.size != 2**self.n_parties:
            raise ValueError(
                f"expected {2**self.n_parties} amplitudes, got {amps.size}")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > ATOL_UNIT:
            raise ValueError(f"state is not normalized (|psi|^2 = {norm2!r})")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_vector(cls, vec) -> "PureState":
        """Normalize ``vec`` and wrap it; the party count is inferred."""
        vec = np.asarray(vec, dtype=complex).ravel()
        norm = np.linalg.norm(vec)
        if norm == 0:
            raise ValueError("cannot normalize the zero vector")
        return cls(_n_qubits(vec.size), vec / norm)

    @classmethod
    def basis(cls, bits: Sequence[int]) -> "PureState":
        bits = list(bits)
        vec = np.zeros(2 ** len(bits), dtype=complex)
        vec[bits_to_index(bits)] = 1.0
        return cls(len(bits), vec)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def density(self) -> "HermitianOp":
        return HermitianOp(np.outer(self.amplitudes, self.amplitudes.conj()))

    def vacuum_weight(self) -> float:
        return float(abs(self.amplitudes[0]) ** 2)


@dataclass(frozen=True, eq=False)
class HermitianOp:
    """Hermitian matrix.  ``dim`` is derived from ``entries``."""

    entries: np.ndarray

    def __post_init__(self):
        m = _frozen(self.entries)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"operator must be square, got shape {m.shape}")
        if not np.allclose(m, m.conj().T, rtol=0, atol=ATOL_UNIT):
            raise ValueError("operator is not Hermitian")
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __add__(self, other: "HermitianOp") -> "HermitianOp":
        return HermitianOp(self.entries + other.entries)

    def __sub__(self, other: "HermitianOp") -> "HermitianOp":
        return HermitianOp(self.entries - other.entries)

    def __mul__(self, scalar: float) -> "HermitianOp":
        return HermitianOp(float(scalar) * self.entries)

    __rmul__ = __mul__

    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def expectation(self, state: PureState) -> float:
        psi = state.amplitudes
        return float(np.vdot(psi, self.entries @ psi).real)

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.entries)[0])


@dataclass(frozen=True, eq=False)
class BinaryMeasurement:
    """Two-outcome POVM ``{element0, element1}``."""

    element0: HermitianOp
    element1: HermitianOp

    def __post_init__(self):
        if self.element0.dim != self.element1.dim:
            raise ValueError("POVM elements have different dimensions")
        total = self.element0.entries + self.element1.entries
        if not np.allclose(total, np.eye(self.element0.dim), rtol=0, atol=ATOL_UNIT):
            raise ValueError("POVM elements do not sum to the identity")
        for el in (self.element0, self.element1):
            if el.min_eigenvalue() < -ATOL_PSD:
                raise ValueError("POVM element is not positive semidefinite")

    @classmethod
    def from_projector(cls, proj) -> "BinaryMeasurement":
        if isinstance(proj, HermitianOp):
            proj = proj.entries
        proj = np.asarray(proj, dtype=complex)
        return cls(HermitianOp(proj), HermitianOp(np.eye(proj.shape[0]) - proj))

    def __getitem__(self, outcome: int) -> HermitianOp:
        if outcome == 0:
            return self.element0
        if outcome == 1:
            return self.element1
        raise IndexError(outcome)


def bits_to_index(bits: Sequence[int]) -> int:
    idx = 0
    for b in bits:
        idx = (idx << 1) | int(b)
    return idx


def index_to_bits(index: int, n: int) -> tuple[int, ...]:
    return tuple((index >> (n - 1 - i)) & 1 for i in range(n))


def ket(label: str) -> PureState:
    """Single-qubit or product ket from a label such as ``"0"``, ``"+-"``."""
    single = {
        "0": np.array([1, 0]),
        "1": np.array([0, 1]),
        "+": np.array([1, 1]) / np.sqrt(2),
        "-": np.array([1, -1]) / np.sqrt(2),
    }
    try:
        vecs = [single[c] for c in label]
    except KeyError as exc:
        raise ValueError(f"unknown ket label {label!r}") from exc
    return PureState(len(vecs), reduce(np.kron, vecs).astype(complex))


def vacuum_projector(n: int) -> HermitianOp:
    m = np.zeros((2**n, 2**n), dtype=complex)
    m[0, 0] = 1.0
    return HermitianOp(m)


def energy_operator(n: int) -> HermitianOp:
    """``1 - |0...0><0...0|`` on n qubits."""
    m = np.eye(2**n, dtype=complex)
    m[0, 0] = 0.0
    return HermitianOp(m)


def tensor(factors: Sequence[PureState | HermitianOp]):
    """Kronecker product of states or of operators, in the given party order."""
    factors = list(factors)
    if not factors:
        raise ValueError("tensor of an empty list")
    if all(isinstance(f, PureState) for f in factors):
        amps = reduce(np.kron, [f.amplitudes for f in factors])
        return PureState(sum(f.n_parties for f in factors), amps)
    if all(isinstance(f, HermitianOp) for f in factors):
        return HermitianOp(reduce(np.kron, [f.entries for f in factors]))
    raise TypeError("cannot mix states and operators in a tensor product")


def partial_trace(op: HermitianOp, n_parties: int, keep) -> HermitianOp:
    """Reduce ``op`` onto the parties in ``keep`` (returned in ascending order)."""
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("keep set must be nonempty")
    if op.dim != 2**n_parties:
        raise ValueError(f"operator dimension {op.dim} does not match {n_parties} qubits")
    if keep[0] < 0 or keep[-1] >= n_parties:
        raise ValueError(f"party index out of range for n = {n_parties}")
    traced = [i for i in range(n_parties) if i not in keep]
    t = op.entries.reshape([2] * (2 * n_parties))
    # bra axes sit at offset n_parties
    perm = keep + traced + [n_parties + i for i in keep] + [n_parties + i for i in traced]
    t = t.transpose(perm)
    dk, dt = 2 ** len(keep), 2 ** len(traced)
    t = t.reshape(dk, dt, dk, dt)
    return HermitianOp(np.einsum("ajbj->ab", t))


def permute_parties(state: PureState, perm: Sequence[int]) -> PureState:
    """Move the factor of party ``i`` to position ``perm[i]``.

    For a product state ``a (x) b (x) c`` and ``perm = (1, 2, 0)`` the result is
    ``c (x) a (x) b``.
    """
    n = state.n_parties
    perm = [int(p) for p in perm]
    if sorted(perm) != list(range(n)):
        raise ValueError(f"{perm} is not a permutation of 0..{n - 1}")
    t = state.amplitudes.reshape([2] * n)
    # axis j of the output is axis inverse[j] of the input
    inverse = np.argsort(perm)
    return PureState(n, t.transpose(inverse).ravel())


def top_eigenpair(op: HermitianOp | np.ndarray) -> tuple[float, np.ndarray]:
    """Largest eigenvalue and a unit eigenvector."""
    m = op.entries if isinstance(op, HermitianOp) else np.asarray(op, dtype=complex)
    if not np.allclose(m, m.conj().T, rtol=0, atol=ATOL_UNIT):
        raise ValueError("top_eigenpair requires a Hermitian operator")
    vals, vecs = np.linalg.eigh(m)
    return float(vals[-1]), vecs[:, -1]


def apply_local(psi: np.ndarray, ops: Sequence[np.ndarray | None]) -> np.ndarray:
    """Apply single-qubit ``ops[i]`` to qubit ``i`` of the vector ``psi``.

    ``None`` entries leave that party untouched.  Leading batch axes are
    allowed: ``psi`` may have shape ``(..., 2**n)``.
    """
    n = len(ops)
    batch = psi.shape[:-1]
    t = psi.reshape(batch + (2,) * n)
    nb = len(batch)
    for i, m in enumerate(ops):
        if m is None:
            continue
        t = np.moveaxis(np.tensordot(m, t, axes=([1], [nb + i])), 0, nb + i)
    return t.reshape(batch + (2**n,))
