"""Dense linear algebra for the least-squares objective.

Matrices and vectors are plain float64 numpy arrays. ``LinearSystem`` and
``CongruenceDecomposition`` hold read-only copies so they can be shared
freely between threads.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NotPSD, NotSymmetric, SingularWarning

RTOL = 1e-9


def as_matrix(a, name="matrix") -> np.ndarray:
    m = np.array(a, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise DimensionMismatch(f"{name} must be a nonempty 2-D array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    m.setflags(write=False)
    return m


def as_vector(v, name="vector") -> np.ndarray:
    x = np.array(v, dtype=np.float64)
    if x.ndim != 1:
        raise DimensionMismatch(f"{name} must be 1-D, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} has non-finite entries")
    x.setflags(write=False)
    return x


@dataclass(frozen=True)
class LinearSystem:
    """The system ``A x = b``."""

    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        A = as_matrix(self.A, "A")
        b = as_vector(self.b, "b")
        if A.shape[0] != b.shape[0]:
            raise DimensionMismatch(f"A has {A.shape[0]} rows but b has length {b.shape[0]}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def num_vars(self) -> int:
        return self.A.shape[1]

    @property
    def rhs_norm_sq(self) -> float:
        return float(self.b @ self.b)


@dataclass(frozen=True)
class CongruenceDecomposition:
    """Nonsingular ``R`` and diagonal ``D`` with ``R.T @ M @ R == diag(D)``.

    ``singular`` lists the pivot indices that vanished during elimination.
    """

    R: np.ndarray
    D: np.ndarray
    scale: np.ndarray
    singular: tuple[int, ...] = field(default=())

    @property
    def is_singular(self) -> bool:
        return bool(self.singular)


def gram(A) -> np.ndarray:
    """Return ``A.T @ A``, symmetric by construction."""
    A = as_matrix(A, "A")
    G = A.T @ A
    # the BLAS product is not guaranteed bitwise symmetric
    G = np.triu(G) + np.triu(G, 1).T
    G.setflags(write=False)
    return G


def _tolerance(M: np.ndarray) -> float:
    return RTOL * max(float(np.max(np.abs(M))), 1.0) if M.size else RTOL


def congruence_diagonalize(M, scale=None) -> CongruenceDecomposition:
    """Diagonalize a symmetric PSD matrix by symmetric Gaussian elimination.

    Column operations clear the entries right of each pivot, and the same
    operations applied to rows keep the working matrix symmetric. The
    accumulated column operations form a unit upper-triangular ``R``; column
    ``j`` is then multiplied by ``scale[j]``, which multiplies ``D[j]`` by
    ``scale[j] ** 2``.

    A pivot within tolerance of zero is recorded in ``singular`` (and a
    ``SingularWarning`` is issued). If the rest of its row is negligible too,
    the column is left untouched and the ``D`` entry is zero; a small positive
    pivot that still couples to later columns is eliminated as usual.
    """
    M = as_matrix(M, "M")
    n = M.shape[0]
    if M.shape != (n, n):
        raise DimensionMismatch(f"M must be square, got shape {M.shape}")
    tol = _tolerance(M)
    if np.max(np.abs(M - M.T)) > tol:
        raise NotSymmetric("matrix is not symmetric within tolerance")

    if scale is None:
        s = np.ones(n)
    else:
        s = as_vector(scale, "scale")
        if s.shape[0] != n:
            raise DimensionMismatch(f"scale has length {s.shape[0]}, expected {n}")
        if np.any(s <= 0):
            raise ValueError("scale entries must be positive")

    W = M.copy()
    R = np.eye(n)
    singular = []
    for k in range(n):
        pivot = W[k, k]
        if pivot < -tol:
            raise NotPSD(f"pivot {k} is {pivot:.6g} < 0; matrix is not positive semidefinite")
        if abs(pivot) <= tol:
            singular.append(k)
            coupled = np.max(np.abs(W[k, k + 1:]), initial=0.0)
            if coupled <= tol:
                W[k, k] = 0.0
                continue
            # a tiny positive pivot with real coupling must still be eliminated
            if pivot <= 0.0:
                raise NotPSD(f"zero pivot {k} with nonzero coupling; matrix is indefinite")
        for j in range(k + 1, n):
            f = W[k, j] / pivot
            if f == 0.0:
                continue
            R[:, j] -= f * R[:, k]
            W[:, j] -= f * W[:, k]
            W[j, :] -= f * W[k, :]

    D = np.diag(W).copy()
    if np.any(D < -tol):
        raise NotPSD("negative diagonal entry after elimination")
    D = np.where(np.abs(D) <= tol, 0.0, D)

    R = R * s[np.newaxis, :]
    D = D * s**2
    if singular:
        warnings.warn(
            f"Gram matrix is rank deficient (zero pivots at {singular})",
            SingularWarning,
            stacklevel=2,
        )
    for arr in (R, D, s):
        arr.setflags(write=False)
    return CongruenceDecomposition(R=R, D=D, scale=s, singular=tuple(singular))


def decomposition_from_R(M, R) -> CongruenceDecomposition:
    """Wrap a caller-supplied ``R``; checks that ``R.T @ M @ R`` is diagonal."""
    M = as_matrix(M, "M")
    R = as_matrix(R, "R")
    n = M.shape[0]
    if R.shape != (n, n):
        raise DimensionMismatch(f"R must be {n}x{n}, got {R.shape}")
    if abs(np.linalg.det(R)) <= RTOL * max(float(np.max(np.abs(R))), 1.0) ** n:
        raise ValueError("R is singular")
    C = R.T @ M @ R
    tol = _tolerance(M) * max(float(np.max(np.abs(R))), 1.0) ** 2
    off = C - np.diag(np.diag(C))
    if np.max(np.abs(off)) > tol:
        raise ValueError("R.T @ M @ R is not diagonal")
    D = np.diag(C).copy()
    if np.any(D < -tol):
        raise NotPSD("R.T @ M @ R has a negative diagonal entry")
    singular = tuple(int(i) for i in np.flatnonzero(np.abs(D) <= tol))
    D = np.where(np.abs(D) <= tol, 0.0, D)
    scale = np.ones(n)
    for arr in (R, D, scale):
        arr.setflags(write=False)
    return CongruenceDecomposition(R=R, D=D, scale=scale, singular=singular)


def solve_via_congruence(sys: LinearSystem, dec: CongruenceDecomposition):
    """Real minimizer of the diagonalized objective; returns ``(y, x)`` with ``x = R y``.

    Components with a vanishing ``D`` entry are set to zero.
    """
    if dec.R.shape[0] != sys.num_vars:
        raise DimensionMismatch("decomposition does not match the system")
    c = dec.R.T @ (sys.A.T @ sys.b)
    tol = _tolerance(np.diag(dec.D))
    y = np.zeros_like(c)
    live = dec.D > tol
    y[live] = c[live] / dec.D[live]
    x = dec.R @ y
    return y, x


def residual_norm_sq(sys: LinearSystem, x) -> float:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (sys.num_vars,):
        raise DimensionMismatch(f"x has shape {x.shape}, expected ({sys.num_vars},)")
    r = sys.A @ x - sys.b
    return float(r @ r)
