"""Signed radix-2 encoding of real variables into qubit groups.

Each variable owns ``2 * k`` consecutive qubits, ``k = high_exp - low_exp + 1``:
first the plus group with weights ``2**low_exp .. 2**high_exp``, then the
minus group with the same weights negated. Variables follow in index order.
With ``low_exp=0, high_exp=2`` a variable reads
``q1 + 2 q2 + 4 q3 - q4 - 2 q5 - 4 q6``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotRepresentable

# slack for values produced by floating-point solves, e.g. -2.0000000000000004
INT_RTOL = 1e-9


@dataclass(frozen=True)
class RadixEncoding:
    num_vars: int
    low_exp: int = 0
    high_exp: int = 2

    def __post_init__(self):
        if int(self.num_vars) != self.num_vars or self.num_vars < 1:
            raise ValueError(f"num_vars must be a positive integer, got {self.num_vars!r}")
        if int(self.low_exp) != self.low_exp or int(self.high_exp) != self.high_exp:
            raise ValueError("exponents must be integers")
        if self.low_exp > self.high_exp:
            raise ValueError(f"low_exp {self.low_exp} exceeds high_exp {self.high_exp}")

    @property
    def digits(self) -> int:
        return self.high_exp - self.low_exp + 1

    @property
    def qubits_per_var(self) -> int:
        return 2 * self.digits

    @property
    def num_qubits(self) -> int:
        return self.num_vars * self.qubits_per_var

    def group_weights(self) -> np.ndarray:
        """Weights of one variable's qubits, plus group then minus group."""
        w = 2.0 ** np.arange(self.low_exp, self.high_exp + 1)
        return np.concatenate([w, -w])

    def weights(self) -> np.ndarray:
        return np.tile(self.group_weights(), self.num_vars)

    def var_of(self) -> np.ndarray:
        """Variable index of every qubit."""
        return np.repeat(np.arange(self.num_vars), self.qubits_per_var)

    def sign_of(self) -> np.ndarray:
        """+1 for plus-group qubits, -1 for minus-group qubits."""
        one = np.concatenate([np.ones(self.digits, int), -np.ones(self.digits, int)])
        return np.tile(one, self.num_vars)

    def qubit_index(self, var: int, exp: int, sign: int) -> int:
        if not self.low_exp <= exp <= self.high_exp:
            raise IndexError(f"exponent {exp} outside [{self.low_exp}, {self.high_exp}]")
        offset = exp - self.low_exp + (0 if sign > 0 else self.digits)
        return var * self.qubits_per_var + offset

    def blocks(self) -> list[range]:
        """Qubit index ranges of the sign groups, in order."""
        k = self.digits
        return [range(g * k, (g + 1) * k) for g in range(2 * self.num_vars)]


def num_qubits(enc: RadixEncoding) -> int:
    return enc.num_qubits


def _bits_array(enc: RadixEncoding, q) -> np.ndarray:
    bits = np.asarray(q)
    if bits.shape[-1] != enc.num_qubits:
        raise DimensionMismatch(f"expected {enc.num_qubits} bits, got {bits.shape[-1]}")
    if not np.all((bits == 0) | (bits == 1)):
        raise ValueError("bits must be 0 or 1")
    return bits


def decode(enc: RadixEncoding, q) -> np.ndarray:
    """Real values encoded by ``q``; also accepts a stack of assignments."""
    bits = _bits_array(enc, q).astype(np.float64)
    shape = bits.shape[:-1] + (enc.num_vars, enc.qubits_per_var)
    return bits.reshape(shape) @ enc.group_weights()


def canonical_encode(enc: RadixEncoding, v) -> tuple[int, ...]:
    """One-sided encoding: per variable at most one sign group is active.

    Raises ``NotRepresentable`` if some ``|v_i| / 2**low_exp`` is not an
    integer (within ``INT_RTOL``) in ``[0, 2**digits - 1]``.
    """
    v = np.atleast_1d(np.asarray(v, dtype=np.float64))
    if v.shape != (enc.num_vars,):
        raise DimensionMismatch(f"expected {enc.num_vars} values, got shape {v.shape}")
    k = enc.digits
    bits = []
    for i, val in enumerate(v):
        units = abs(val) / 2.0**enc.low_exp
        if not np.isfinite(units):
            raise NotRepresentable(f"value {val!r} of variable {i} is not finite")
        m = int(round(units))
        if abs(units - m) > INT_RTOL * max(1.0, units) or m > 2**k - 1:
            raise NotRepresentable(f"value {val!r} of variable {i} is not representable")
        digits = [(m >> d) & 1 for d in range(k)]
        zeros = [0] * k
        bits.extend(digits + zeros if val >= 0 else zeros + digits)
    return tuple(bits)


def enumerate_representations(enc: RadixEncoding, value: float, var_index: int = 0):
    """All ``(plus, minus)`` bit patterns of one variable that decode to ``value``.

    Patterns are returned as flat tuples of length ``2 * digits`` in
    lexicographic order.
    """
    if not 0 <= var_index < enc.num_vars:
        raise IndexError(f"variable {var_index} out of range")
    k = enc.digits
    units = value / 2.0**enc.low_exp
    if not np.isfinite(units):
        return []
    target = int(round(units))
    if abs(units - target) > INT_RTOL * max(1.0, abs(units)):
        return []
    top = 2**k - 1
    out = []
    for p in range(max(0, target), min(top, top + target) + 1):
        n = p - target
        out.append(_digits(p, k) + _digits(n, k))
    out.sort()
    return out


def _digits(m: int, k: int) -> tuple[int, ...]:
    return tuple((m >> d) & 1 for d in range(k))

