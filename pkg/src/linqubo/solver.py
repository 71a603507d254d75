"""Exact and sampled ground states of QUBO matrices.

``brute_force`` enumerates every assignment. ``simulated_anneal`` runs
independent single-flip Metropolis chains, one per read. Each read draws
from its own generator seeded with ``(seed, read_index)``, so results do not
depend on how reads are batched.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .builder import QuboMatrix, energies
from .errors import TooLarge

MAX_EXHAUSTIVE_QUBITS = 30
GROUND_ATOL = 1e-9
_CHUNK = 1 << 16


@dataclass(frozen=True)
class SampleRecord:
    assignment: tuple[int, ...]
    energy: float
    occurrences: int


@dataclass(frozen=True)
class SolveResult:
    """Records sorted by energy then bits.

    ``total_reads`` is the number of samples (``2**n`` for exhaustive
    solves). The record list of an exhaustive solve may be truncated, so
    occurrences only sum to ``total_reads`` when it was not.
    """

    records: tuple[SampleRecord, ...]
    ground_energy: float
    ground_states: tuple[tuple[int, ...], ...]
    total_reads: int

    @property
    def degeneracy(self) -> int:
        return len(self.ground_states)

    def occurrences_of(self, assignments) -> int:
        wanted = {tuple(int(b) for b in a) for a in assignments}
        return sum(r.occurrences for r in self.records if r.assignment in wanted)


@dataclass(frozen=True)
class AnnealParams:
    num_reads: int = 1000
    sweeps_per_read: int = 100
    beta_initial: float = 0.05
    beta_final: float = 5.0
    seed: int = 0

    def __post_init__(self):
        if self.num_reads < 1 or self.sweeps_per_read < 1:
            raise ValueError("num_reads and sweeps_per_read must be positive")
        if not 0 < self.beta_initial < self.beta_final:
            raise ValueError("need 0 < beta_initial < beta_final")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def betas(self) -> np.ndarray:
        """Geometric schedule, one inverse temperature per sweep."""
        if self.sweeps_per_read == 1:
            return np.array([self.beta_final])
        return np.geomspace(self.beta_initial, self.beta_final, self.sweeps_per_read)


def _index_bits(idx: np.ndarray, n: int) -> np.ndarray:
    # bit 0 is the most significant, so integer order is lexicographic order
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((idx[:, None] >> shifts) & 1).astype(np.int8)


def _make_result(bits: np.ndarray, e: np.ndarray, counts: np.ndarray, total: int) -> SolveResult:
    keys = [bits[:, k] for k in range(bits.shape[1] - 1, -1, -1)]
    order = np.lexsort(keys + [e])
    records = tuple(
        SampleRecord(tuple(int(b) for b in bits[k]), float(e[k]), int(counts[k])) for k in order
    )
    if not records:
        return SolveResult((), 0.0, ((),), total)
    ground = records[0].energy
    ground_states = tuple(r.assignment for r in records if r.energy <= ground + GROUND_ATOL)
    return SolveResult(records, ground, ground_states, total)


def brute_force(Q: QuboMatrix, max_records: int | None = None) -> SolveResult:
    """Evaluate all ``2**n`` assignments.

    Every ground state is kept. ``max_records`` caps the number of
    non-ground records (lowest energies first); ``None`` keeps them all.
    """
    n = Q.n
    if n > MAX_EXHAUSTIVE_QUBITS:
        raise TooLarge(f"{n} qubits exceeds the exhaustive limit of {MAX_EXHAUSTIVE_QUBITS}")
    if n == 0:
        return SolveResult((SampleRecord((), 0.0, 1),), 0.0, ((),), 1)
    total = 1 << n
    U = Q.to_dense()
    best_idx = np.empty(0, dtype=np.int64)
    best_e = np.empty(0)
    ground = np.inf
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        X = _index_bits(idx, n).astype(np.float64)
        e = np.einsum("ij,ij->i", X @ U, X)
        ground = min(ground, float(e.min()))
        best_idx = np.concatenate([best_idx, idx])
        best_e = np.concatenate([best_e, e])
        if max_records is not None:
            is_ground = best_e <= ground + GROUND_ATOL
            rest = np.flatnonzero(~is_ground)
            if rest.size > max_records:
                keep = rest[np.argsort(best_e[rest], kind="stable")[:max_records]]
                sel = np.concatenate([np.flatnonzero(is_ground), keep])
                best_idx, best_e = best_idx[sel], best_e[sel]
    bits = _index_bits(best_idx, n)
    return _make_result(bits, best_e, np.ones(best_idx.size, dtype=np.int64), total)


def _anneal_batch(Q: QuboMatrix, p: AnnealParams, reads: range) -> np.ndarray:
    n = Q.n
    S = Q.couplings()
    h = Q.linear()
    betas = p.betas()
    draws = np.empty((len(reads), n * (p.sweeps_per_read + 1)))
    for k, r in enumerate(reads):
        rng = np.random.default_rng(np.random.SeedSequence(p.seed, spawn_key=(r,)))
        draws[k] = rng.random(draws.shape[1])
    X = (draws[:, :n] < 0.5).astype(np.float64)
    u = draws[:, n:].reshape(len(reads), p.sweeps_per_read, n)
    for s, beta in enumerate(betas):
        for i in range(n):
            field = h[i] + X @ S[:, i]
            delta = (1.0 - 2.0 * X[:, i]) * field
            accept = (delta <= 0.0) | (u[:, s, i] < np.exp(-beta * np.maximum(delta, 0.0)))
            X[accept, i] = 1.0 - X[accept, i]
    return X.astype(np.int8)


def simulated_anneal(Q: QuboMatrix, p: AnnealParams, batch_size: int = 2048) -> SolveResult:
    """Sample final states of ``p.num_reads`` independent annealing chains.

    Each read starts from a uniformly random assignment and performs
    ``sweeps_per_read`` sweeps; a sweep proposes one flip per qubit in index
    order at that sweep's inverse temperature. ``batch_size`` only trades
    memory for speed.
    """
    if Q.n < 1:
        raise ValueError("QUBO has no variables")
    finals = []
    for start in range(0, p.num_reads, batch_size):
        finals.append(_anneal_batch(Q, p, range(start, min(start + batch_size, p.num_reads))))
    X = np.concatenate(finals)
    uniq, counts = np.unique(X, axis=0, return_counts=True)
    return _make_result(uniq, energies(Q, uniq), counts, p.num_reads)


def ground_hit_rate(result: SolveResult, reference_ground) -> float:
    """Fraction of reads that ended in one of ``reference_ground``."""
    if result.total_reads == 0:
        return 0.0
    return result.occurrences_of(reference_ground) / result.total_reads
