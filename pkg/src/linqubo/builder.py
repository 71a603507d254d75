"""Expand least-squares objectives into upper-triangular QUBO matrices.

Both models are instances of one expansion: a quadratic form
``z.T @ M @ z - 2 c.T @ z`` over encoded variables ``z``.

* vanilla: ``z = x``, ``M = A.T A``, ``c = A.T b``
* congruence: ``z = y = R^-1 x``, ``M = D`` (diagonal), ``c = R.T A.T b``

Squared qubits fold onto the diagonal (``q*q == q``). With ``annihilate_pm``
the products of a variable's plus and minus qubits are dropped, which is
exact on one-sided assignments and penalizes two-sided ones when the
variable's curvature is positive.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .encoding import RadixEncoding
from .errors import DimensionMismatch
from .linalg import CongruenceDecomposition, LinearSystem, gram

PRUNE_RTOL = 1e-12


@dataclass(frozen=True)
class ReductionFlags:
    fold_squares: bool = True
    annihilate_pm: bool = False

    def __post_init__(self):
        if not self.fold_squares:
            raise ValueError("fold_squares must be True")


@dataclass(frozen=True)
class QuboMatrix:
    """Sparse upper-triangular QUBO: ``E(q) = sum_{i<=j} coeffs[i, j] q_i q_j``.

    ``offset`` is the constant ``b.T b`` that turns the energy into the
    squared residual. ``model``, ``annihilate_pm`` and ``encoding`` are
    descriptive metadata and may be ``None`` for QUBOs read from plain
    coordinate files.
    """

    n: int
    coeffs: Mapping[tuple[int, int], float]
    offset: float = 0.0
    model: str | None = None
    annihilate_pm: bool | None = None
    encoding: RadixEncoding | None = None
    _dense: np.ndarray = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        clean = {}
        for (i, j), v in self.coeffs.items():
            i, j, v = int(i), int(j), float(v)
            if not 0 <= i <= j < self.n:
                raise IndexError(f"coefficient key {(i, j)} invalid for n={self.n}")
            if not np.isfinite(v):
                raise ValueError(f"coefficient {(i, j)} is not finite")
            if v != 0.0:
                clean[(i, j)] = v
        object.__setattr__(self, "coeffs", MappingProxyType(dict(sorted(clean.items()))))
        object.__setattr__(self, "offset", float(self.offset))
        U = np.zeros((self.n, self.n))
        for (i, j), v in clean.items():
            U[i, j] = v
        U.setflags(write=False)
        object.__setattr__(self, "_dense", U)

    @property
    def nnz(self) -> int:
        return len(self.coeffs)

    def to_dense(self) -> np.ndarray:
        """Upper-triangular dense copy."""
        return self._dense.copy()

    def couplings(self) -> np.ndarray:
        """Symmetric off-diagonal coupling matrix (zero diagonal)."""
        U = self._dense
        S = np.triu(U, 1)
        return S + S.T

    def linear(self) -> np.ndarray:
        return np.diag(self._dense).copy()

    @classmethod
    def from_dense(cls, U, offset=0.0, **meta) -> "QuboMatrix":
        U = np.asarray(U, dtype=np.float64)
        n = U.shape[0]
        if U.shape != (n, n):
            raise DimensionMismatch("QUBO matrix must be square")
        if np.any(np.tril(U, -1) != 0):
            raise ValueError("QUBO matrix must be upper triangular")
        coeffs = {(int(i), int(j)): U[i, j] for i, j in zip(*np.nonzero(U))}
        return cls(n=n, coeffs=coeffs, offset=offset, **meta)

    def __eq__(self, other):
        if not isinstance(other, QuboMatrix):
            return NotImplemented
        return (
            self.n == other.n
            and dict(self.coeffs) == dict(other.coeffs)
            and self.offset == other.offset
        )

    __hash__ = None


def _expand(M, c, enc: RadixEncoding, annihilate_pm: bool) -> np.ndarray:
    w = enc.weights()
    var = enc.var_of()
    sign = enc.sign_of()
    Mq = M[np.ix_(var, var)]
    U = 2.0 * np.triu(Mq * np.outer(w, w), 1)
    if annihilate_pm:
        opposite = (var[:, None] == var[None, :]) & (sign[:, None] != sign[None, :])
        U[opposite] = 0.0
    U[np.diag_indices_from(U)] = np.diag(Mq) * w * w - 2.0 * c[var] * w
    scale = np.max(np.abs(U)) if U.size else 0.0
    U[np.abs(U) < PRUNE_RTOL * scale] = 0.0
    return U


def build_vanilla(sys: LinearSystem, enc: RadixEncoding, flags: ReductionFlags | None = None) -> QuboMatrix:
    """QUBO of ``x.T A.T A x - 2 b.T A x`` over the encoding of ``x``."""
    flags = flags or ReductionFlags(annihilate_pm=False)
    if enc.num_vars != sys.num_vars:
        raise DimensionMismatch(f"encoding has {enc.num_vars} variables, system has {sys.num_vars}")
    U = _expand(gram(sys.A), sys.A.T @ sys.b, enc, flags.annihilate_pm)
    return QuboMatrix.from_dense(
        U, offset=sys.rhs_norm_sq, model="vanilla", annihilate_pm=flags.annihilate_pm, encoding=enc
    )


def build_congruence(
    sys: LinearSystem,
    dec: CongruenceDecomposition,
    enc: RadixEncoding,
    flags: ReductionFlags | None = None,
) -> QuboMatrix:
    """QUBO of ``y.T D y - 2 (b.T A R) y`` over the encoding of ``y = R^-1 x``."""
    flags = flags or ReductionFlags(annihilate_pm=True)
    if enc.num_vars != sys.num_vars:
        raise DimensionMismatch(f"encoding has {enc.num_vars} variables, system has {sys.num_vars}")
    if dec.R.shape != (sys.num_vars, sys.num_vars):
        raise DimensionMismatch("decomposition does not match the system")
    c = dec.R.T @ (sys.A.T @ sys.b)
    U = _expand(np.diag(dec.D), c, enc, flags.annihilate_pm)
    return QuboMatrix.from_dense(
        U, offset=sys.rhs_norm_sq, model="congruence", annihilate_pm=flags.annihilate_pm, encoding=enc
    )


def energy(Q: QuboMatrix, q) -> float:
    """``sum_{i<=j} coeffs[i, j] q_i q_j``, without the offset."""
    bits = np.asarray(q, dtype=np.float64)
    if bits.shape != (Q.n,):
        raise DimensionMismatch(f"assignment has shape {bits.shape}, expected ({Q.n},)")
    return float(sum(v * bits[i] * bits[j] for (i, j), v in Q.coeffs.items()))


def energies(Q: QuboMatrix, bits) -> np.ndarray:
    """Vectorized energies of a stack of assignments, shape ``(m, n)``."""
    X = np.asarray(bits, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != Q.n:
        raise DimensionMismatch(f"assignments have shape {X.shape}, expected (m, {Q.n})")
    return np.einsum("ij,ij->i", X @ Q._dense, X)


def total_objective(Q: QuboMatrix, q) -> float:
    return energy(Q, q) + Q.offset


@dataclass(frozen=True)
class SparsityReport:
    nnz: int
    bound: int
    block_sizes: tuple[int, ...]

    @property
    def dense_bound(self) -> int:
        n = sum(self.block_sizes)
        return n * (n + 1) // 2


def coupling_blocks(Q: QuboMatrix) -> list[list[int]]:
    """Connected components of the coupling graph, ordered by smallest index."""
    parent = list(range(Q.n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, j in Q.coeffs:
        if i != j:
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[int]] = {}
    for i in range(Q.n):
        groups.setdefault(find(i), []).append(i)
    return [groups[r] for r in sorted(groups)]


def sparsity_report(Q: QuboMatrix) -> SparsityReport:
    """Stored nonzeros against the upper-triangular bound of the block structure."""
    sizes = tuple(len(b) for b in coupling_blocks(Q))
    bound = sum(s * (s + 1) // 2 for s in sizes)
    return SparsityReport(nnz=Q.nnz, bound=bound, block_sizes=sizes)
