"""QUBO formulations of linear systems ``A x = b``.

Two models are built from the least-squares objective: the direct
(vanilla) expansion over ``x`` and a congruence-diagonalized expansion over
``y = R^-1 x`` whose QUBO is block diagonal by sign group.
"""

from .builder import (
    QuboMatrix,
    ReductionFlags,
    SparsityReport,
    build_congruence,
    build_vanilla,
    energy,
    sparsity_report,
    total_objective,
)
from .encoding import RadixEncoding, canonical_encode, decode, enumerate_representations, num_qubits
from .errors import (
    DimensionMismatch,
    DuplicateEntry,
    LinQuboError,
    NotPSD,
    NotRepresentable,
    NotSymmetric,
    ParseError,
    SingularWarning,
    TooLarge,
)
from .io import ProblemFile, read_problem, read_qubo, write_problem, write_qubo
from .linalg import (
    CongruenceDecomposition,
    LinearSystem,
    congruence_diagonalize,
    gram,
    residual_norm_sq,
    solve_via_congruence,
)
from .solver import AnnealParams, SampleRecord, SolveResult, brute_force, ground_hit_rate, simulated_anneal

__version__ = "0.1.0"
