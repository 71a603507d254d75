"""Problem and QUBO files.

Problem files are JSON objects::

    {"A": [[3, 1], [-1, 2]], "b": [-1, 5],
     "encoding": {"low": 0, "high": 2},
     "scale": [0.4, 0.4]}          # optional; "R" may override elimination

QUBO files come in two forms, both with 0-based indices and ``i <= j``:

* JSON with ``n``, ``offset``, ``entries`` (``[i, j, value]`` triples) and
  metadata ``model``, ``annihilate_pm`` and ``encoding``;
* a coordinate list for annealer interop: a header ``qubo <n> <offset>``
  followed by ``<i> <j> <value>`` lines.

Floats are written with ``repr``, which round-trips exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .builder import QuboMatrix
from .encoding import RadixEncoding
from .errors import DimensionMismatch, DuplicateEntry, ParseError
from .linalg import LinearSystem

FORMAT_JSON = "json"
FORMAT_COO = "coo"


@dataclass(frozen=True)
class ProblemFile:
    A: tuple
    b: tuple
    low_exp: int = 0
    high_exp: int = 2
    scale: tuple | None = None
    R: tuple | None = None

    def __post_init__(self):
        A = _float_rows(self.A, "A")
        b = _float_list(self.b, "b")
        if not A or any(len(row) != len(A[0]) for row in A) or not A[0]:
            raise DimensionMismatch("A must be a nonempty rectangular array")
        if len(b) != len(A):
            raise DimensionMismatch(f"b has length {len(b)} but A has {len(A)} rows")
        ncols = len(A[0])
        scale = None
        if self.scale is not None:
            scale = _float_list(self.scale, "scale")
            if len(scale) != ncols:
                raise DimensionMismatch(f"scale has length {len(scale)}, expected {ncols}")
            if any(s <= 0 for s in scale):
                raise ParseError("scale entries must be positive", field="scale")
        R = None
        if self.R is not None:
            R = _float_rows(self.R, "R")
            if len(R) != ncols or any(len(row) != ncols for row in R):
                raise DimensionMismatch(f"R must be {ncols}x{ncols}")
        if int(self.low_exp) != self.low_exp or int(self.high_exp) != self.high_exp:
            raise ParseError("encoding exponents must be integers", field="encoding")
        if self.low_exp > self.high_exp:
            raise ParseError("encoding.low exceeds encoding.high", field="encoding")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "scale", scale)
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "low_exp", int(self.low_exp))
        object.__setattr__(self, "high_exp", int(self.high_exp))

    @property
    def system(self) -> LinearSystem:
        return LinearSystem(np.array(self.A), np.array(self.b))

    @property
    def encoding(self) -> RadixEncoding:
        return RadixEncoding(len(self.A[0]), self.low_exp, self.high_exp)


def _float_list(values, name) -> tuple:
    if not isinstance(values, (list, tuple)):
        raise ParseError("expected an array of numbers", field=name)
    out = []
    for v in values:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ParseError(f"non-numeric entry {v!r}", field=name)
        v = float(v)
        if not np.isfinite(v):
            raise ParseError("non-finite entry", field=name)
        out.append(v)
    return tuple(out)


def _float_rows(rows, name) -> tuple:
    if not isinstance(rows, (list, tuple)):
        raise ParseError("expected an array of arrays", field=name)
    return tuple(_float_list(r, name) for r in rows)


def _load_json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from None


def read_problem(text: str) -> ProblemFile:
    data = _load_json(text)
    if not isinstance(data, dict):
        raise ParseError("problem file must be a JSON object")
    for key in ("A", "b", "encoding"):
        if key not in data:
            raise ParseError("missing required key", field=key)
    enc = data["encoding"]
    if not isinstance(enc, dict) or "low" not in enc or "high" not in enc:
        raise ParseError("encoding needs integer 'low' and 'high'", field="encoding")
    for key in ("low", "high"):
        if isinstance(enc[key], bool) or not isinstance(enc[key], int):
            raise ParseError("must be an integer", field=f"encoding.{key}")
    unknown = set(data) - {"A", "b", "encoding", "scale", "R"}
    if unknown:
        raise ParseError(f"unknown keys {sorted(unknown)}")
    return ProblemFile(
        A=data["A"],
        b=data["b"],
        low_exp=enc["low"],
        high_exp=enc["high"],
        scale=data.get("scale"),
        R=data.get("R"),
    )


def write_problem(pf: ProblemFile) -> str:
    data = {
        "A": [list(r) for r in pf.A],
        "b": list(pf.b),
        "encoding": {"low": pf.low_exp, "high": pf.high_exp},
    }
    if pf.scale is not None:
        data["scale"] = list(pf.scale)
    if pf.R is not None:
        data["R"] = [list(r) for r in pf.R]
    return json.dumps(data, indent=2) + "\n"


def qubo_entries(Q: QuboMatrix, include_zeros: bool = False):
    """``(i, j, value)`` in ascending ``(i, j)``; optionally every upper-triangular pair."""
    if not include_zeros:
        return [(i, j, v) for (i, j), v in Q.coeffs.items()]
    return [(i, j, Q.coeffs.get((i, j), 0.0)) for i in range(Q.n) for j in range(i, Q.n)]


def write_qubo(Q: QuboMatrix, include_zeros: bool = False, fmt: str = FORMAT_JSON) -> str:
    entries = qubo_entries(Q, include_zeros)
    if fmt == FORMAT_COO:
        lines = [f"qubo {Q.n} {Q.offset!r}"]
        lines += [f"{i} {j} {float(v)!r}" for i, j, v in entries]
        return "\n".join(lines) + "\n"
    if fmt != FORMAT_JSON:
        raise ValueError(f"unknown QUBO format {fmt!r}")
    enc = Q.encoding
    data = {
        "format": "qubo",
        "n": Q.n,
        "offset": Q.offset,
        "model": Q.model,
        "annihilate_pm": Q.annihilate_pm,
        "encoding": None
        if enc is None
        else {"num_vars": enc.num_vars, "low": enc.low_exp, "high": enc.high_exp},
        "entries": [[i, j, float(v)] for i, j, v in entries],
    }
    # one entry per line keeps diffs and line counts readable
    head = json.dumps({k: v for k, v in data.items() if k != "entries"}, indent=2)[:-2]
    body = ",\n".join("    " + json.dumps(e) for e in data["entries"])
    return f'{head},\n  "entries": [\n{body}\n  ]\n}}\n' if body else f'{head},\n  "entries": []\n}}\n'


def _check_entry(seen, i, j, v, n, line=None):
    if not 0 <= i <= j < n:
        raise ParseError(f"index pair ({i}, {j}) invalid for n={n}", line=line, field="entries")
    if not np.isfinite(v):
        raise ParseError("non-finite value", line=line, field="entries")
    if (i, j) in seen:
        raise DuplicateEntry(f"duplicate entry ({i}, {j})", line=line, field="entries")
    seen[(i, j)] = v


def _read_coo(text: str) -> QuboMatrix:
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty file", line=1)
    head = lines[0].split()
    if len(head) != 3 or head[0] != "qubo":
        raise ParseError("header must be 'qubo <n> <offset>'", line=1)
    try:
        n, offset = int(head[1]), float(head[2])
    except ValueError:
        raise ParseError("bad header values", line=1) from None
    if n < 0:
        raise ParseError("negative qubit count", line=1)
    seen: dict = {}
    for lineno, raw in enumerate(lines[1:], start=2):
        parts = raw.split()
        if not parts:
            continue
        if len(parts) != 3:
            raise ParseError("expected '<i> <j> <value>'", line=lineno)
        try:
            i, j, v = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise ParseError("bad number", line=lineno) from None
        _check_entry(seen, i, j, v, n, lineno)
    return QuboMatrix(n=n, coeffs=seen, offset=offset)


def _read_qubo_json(text: str) -> QuboMatrix:
    data = _load_json(text)
    if not isinstance(data, dict) or data.get("format") != "qubo":
        raise ParseError("not a QUBO file", field="format")
    try:
        n = data["n"]
        offset = float(data["offset"])
        entries = data["entries"]
    except KeyError as exc:
        raise ParseError("missing required key", field=exc.args[0]) from None
    except (TypeError, ValueError):
        raise ParseError("offset must be a number", field="offset") from None
    if isinstance(n, bool) or not isinstance(n, int) or n < 0:
        raise ParseError("n must be a non-negative integer", field="n")
    seen: dict = {}
    for e in entries:
        if not isinstance(e, list) or len(e) != 3:
            raise ParseError(f"bad entry {e!r}", field="entries")
        i, j, v = e
        if not all(isinstance(k, int) and not isinstance(k, bool) for k in (i, j)):
            raise ParseError(f"bad indices in {e!r}", field="entries")
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ParseError(f"bad value in {e!r}", field="entries")
        _check_entry(seen, i, j, float(v), n)
    enc = data.get("encoding")
    encoding = None
    if enc is not None:
        try:
            encoding = RadixEncoding(enc["num_vars"], enc["low"], enc["high"])
        except (KeyError, TypeError, ValueError):
            raise ParseError("bad encoding block", field="encoding") from None
        if encoding.num_qubits != n:
            raise DimensionMismatch(f"encoding has {encoding.num_qubits} qubits but n={n}")
    return QuboMatrix(
        n=n,
        coeffs=seen,
        offset=offset,
        model=data.get("model"),
        annihilate_pm=data.get("annihilate_pm"),
        encoding=encoding,
    )


def read_qubo(text: str) -> QuboMatrix:
    """Parse either QUBO format; explicit zeros are dropped."""
    if text.lstrip().startswith("{"):
        return _read_qubo_json(text)
    return _read_coo(text)
