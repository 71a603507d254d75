"""Model construction from problem files, occurrence tables and model comparison."""

from __future__ import annotations

import csv
import io as _io
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .builder import QuboMatrix, ReductionFlags, build_congruence, build_vanilla, sparsity_report
from .encoding import decode
from .io import ProblemFile
from .linalg import congruence_diagonalize, decomposition_from_R, gram
from .solver import (
    GROUND_ATOL,
    AnnealParams,
    SolveResult,
    brute_force,
    simulated_anneal,
)

MODELS = ("vanilla", "congruence")


def decompose(pf: ProblemFile, scale=None):
    """Congruence decomposition for a problem: explicit ``R`` wins over elimination."""
    M = gram(np.array(pf.A))
    if pf.R is not None:
        return decomposition_from_R(M, np.array(pf.R))
    return congruence_diagonalize(M, scale if scale is not None else pf.scale)


def build_model(pf: ProblemFile, model: str, annihilate_pm: bool | None = None) -> QuboMatrix:
    """Build either model; ``annihilate_pm=None`` picks the model's default."""
    if model == "vanilla":
        flags = ReductionFlags(annihilate_pm=bool(annihilate_pm))
        return build_vanilla(pf.system, pf.encoding, flags)
    if model == "congruence":
        flags = ReductionFlags(annihilate_pm=True if annihilate_pm is None else annihilate_pm)
        return build_congruence(pf.system, decompose(pf), pf.encoding, flags)
    raise ValueError(f"unknown model {model!r}")


def trial_seed(seed: int, trial: int) -> int:
    """Independent 64-bit seed for one trial of a multi-trial run."""
    state = np.random.SeedSequence(seed, spawn_key=(trial,)).generate_state(2, np.uint32)
    return int(state[0]) | (int(state[1]) << 32)


def run_trials(Q: QuboMatrix, params: AnnealParams, trials: int) -> list[SolveResult]:
    out = []
    for t in range(trials):
        p = AnnealParams(
            params.num_reads, params.sweeps_per_read, params.beta_initial, params.beta_final,
            trial_seed(params.seed, t),
        )
        out.append(simulated_anneal(Q, p))
    return out


def _fmt_num(v: float) -> str:
    if abs(v - round(v)) < 1e-9:
        return f"{round(v):.1f}"
    return f"{v:.6g}"


def _render(rows: list[list[str]], align_right: set[int]) -> str:
    widths = [max(len(r[c]) for r in rows) for c in range(len(rows[0]))]
    lines = []
    for k, r in enumerate(rows):
        cells = [r[c].rjust(widths[c]) if c in align_right else r[c].ljust(widths[c]) for c in range(len(r))]
        lines.append("  ".join(cells).rstrip())
        if k == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)


@dataclass(frozen=True)
class TableRow:
    groups: tuple[str, ...]  # per-variable bit strings (or the whole assignment)
    values: tuple[float, ...] | None
    energy: float
    counts: tuple[int, ...]
    merged: int = 1


@dataclass(frozen=True)
class OccurrenceTable:
    """Energy-sorted occurrence counts, one column per trial.

    ``other`` holds reads outside the displayed rows so that every column
    adds up to ``totals``.
    """

    rows: tuple[TableRow, ...]
    other: tuple[int, ...]
    totals: tuple[int, ...]
    lowest_totals: tuple[int, ...]
    ground_energy: float
    degeneracy: int
    exhaustive: bool
    variable_label: str = "x"

    def text(self) -> str:
        ntr = len(self.totals)
        ngroups = len(self.rows[0].groups) if self.rows else 1
        if self.rows and self.rows[0].values is not None:
            head = [f"{self.variable_label}{v + 1} bits" for v in range(ngroups)]
            head.append(self.variable_label)
        else:
            head = ["bits"]
        count_head = ["count"] if self.exhaustive else [f"run {t + 1}" for t in range(ntr)]
        head += ["energy"] + count_head
        rows = [head]
        for r in self.rows:
            cells = list(r.groups)
            if r.values is not None:
                cells.append("(" + ", ".join(_fmt_num(v) for v in r.values) + ")")
            cells.append(_fmt_num(r.energy))
            cells.extend(str(c) for c in r.counts)
            rows.append(cells)
        pad = [""] * (len(head) - 1 - ntr)
        if not self.exhaustive:
            rows.append(pad + ["lowest"] + [str(c) for c in self.lowest_totals])
        rows.append(pad + ["other"] + [str(c) for c in self.other])
        rows.append(pad + ["total"] + [str(c) for c in self.totals])
        right = set(range(len(head) - 1 - ntr, len(head)))
        summary = f"ground energy {_fmt_num(self.ground_energy)}, "
        summary += f"degeneracy {self.degeneracy}" + (" (exact)" if self.exhaustive else " (observed)")
        return _render(rows, right) + "\n" + summary + "\n"

    def csv(self) -> str:
        buf = _io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        ntr = len(self.totals)
        w.writerow(["bits", "values", "energy"] + [f"run_{t + 1}" for t in range(ntr)])
        for r in self.rows:
            values = "" if r.values is None else " ".join(repr(float(v)) for v in r.values)
            w.writerow(["|".join(r.groups), values, repr(r.energy)] + list(r.counts))
        w.writerow(["other", "", ""] + list(self.other))
        w.writerow(["total", "", ""] + list(self.totals))
        return buf.getvalue()


def _levels(energies_sorted, levels: int):
    """Upper energy of the lowest ``levels`` distinct energy levels."""
    cut = None
    seen = 0
    for e in energies_sorted:
        if cut is None or e > cut + GROUND_ATOL:
            seen += 1
            if seen > levels:
                break
            cut = e
    return cut


def occurrence_table(
    Q: QuboMatrix,
    results: list[SolveResult],
    levels: int = 1,
    collapse: bool = True,
    exhaustive: bool = False,
) -> OccurrenceTable:
    """Merge per-trial results into a table of the lowest energy levels.

    With ``collapse`` and a known encoding, the ground rows are merged over
    the last variable whose decoded value is shared by all of them, and its
    cell reads ``all N combos``.
    """
    ntr = len(results)
    merged: dict[tuple, list] = {}
    for t, res in enumerate(results):
        for rec in res.records:
            slot = merged.setdefault(rec.assignment, [rec.energy, [0] * ntr])
            slot[1][t] += rec.occurrences
    items = sorted(merged.items(), key=lambda kv: (kv[1][0], kv[0]))
    totals = tuple(r.total_reads for r in results)
    if not items:
        return OccurrenceTable((), totals, totals, (0,) * ntr, 0.0, 0, exhaustive)
    ground = items[0][1][0]
    cut = _levels([v[0] for _, v in items], max(levels, 1))
    shown = [(a, v) for a, v in items if v[0] <= cut + GROUND_ATOL]
    ground_rows = [(a, v) for a, v in shown if v[0] <= ground + GROUND_ATOL]
    lowest = tuple(sum(v[1][t] for _, v in ground_rows) for t in range(ntr))

    enc = Q.encoding
    label = "y" if Q.model == "congruence" else "x"

    def split(a):
        if enc is None:
            return ("".join(map(str, a)),)
        k = enc.qubits_per_var
        return tuple("".join(map(str, a[i * k:(i + 1) * k])) for i in range(enc.num_vars))

    def values(a):
        return None if enc is None else tuple(float(v) for v in decode(enc, a))

    rows = []
    collapse_var = None
    if collapse and enc is not None and len(ground_rows) > 1:
        vals = np.array([values(a) for a, _ in ground_rows])
        for v in range(enc.num_vars - 1, -1, -1):
            patterns = {split(a)[v] for a, _ in ground_rows}
            if len(patterns) > 1 and np.all(np.abs(vals[:, v] - vals[0, v]) < 1e-12):
                collapse_var = v
                break
    if collapse_var is not None:
        groups: dict[tuple, list] = {}
        for a, (e, counts) in ground_rows:
            g = list(split(a))
            g[collapse_var] = None
            key = tuple(g)
            slot = groups.setdefault(key, [a, e, [0] * ntr, set()])
            slot[2] = [x + y for x, y in zip(slot[2], counts)]
            slot[3].add(split(a)[collapse_var])
        for key, (a, e, counts, pats) in groups.items():
            g = list(key)
            g[collapse_var] = f"all {len(pats)} combos"
            rows.append(TableRow(tuple(g), values(a), e, tuple(counts), merged=len(pats)))
        rest = [(a, v) for a, v in shown if v[0] > ground + GROUND_ATOL]
    else:
        rest = shown
    for a, (e, counts) in rest:
        rows.append(TableRow(split(a), values(a), e, tuple(counts)))
    other = tuple(totals[t] - sum(r.counts[t] for r in rows) for t in range(ntr))
    degeneracy = results[0].degeneracy if exhaustive else len(ground_rows)
    return OccurrenceTable(tuple(rows), other, totals, lowest, ground, degeneracy, exhaustive, label)


@dataclass(frozen=True)
class ModelSummary:
    model: str
    qubits: int
    nnz: int
    nnz_bound: int
    ground_energy: float
    degeneracy: int
    exact_ground: bool
    hits: tuple[int, ...]
    reads: int

    @property
    def hit_rates(self) -> tuple[float, ...]:
        return tuple(h / self.reads for h in self.hits)

    @property
    def mean_hit_rate(self) -> float:
        return float(np.mean(self.hit_rates))


@dataclass(frozen=True)
class CompareReport:
    vanilla: ModelSummary
    congruence: ModelSummary
    params: AnnealParams
    trials: int

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.congruence.nnz, self.vanilla.nnz)

    def ratio_line(self) -> str:
        a, b = self.congruence.nnz, self.vanilla.nnz
        rel = "<" if 3 * a < b else ">="
        return f"nnz ratio congruence/vanilla: {a}/{b} {rel} 1/3 ({a / b:.6f})"

    def text(self) -> str:
        p = self.params
        head = ["model", "qubits", "nnz", "bound", "ground", "degeneracy"]
        head += [f"run {t + 1}" for t in range(self.trials)] + ["mean hit rate"]
        rows = [head]
        for m in (self.vanilla, self.congruence):
            deg = str(m.degeneracy) + ("" if m.exact_ground else "*")
            rows.append(
                [m.model, str(m.qubits), str(m.nnz), str(m.nnz_bound), _fmt_num(m.ground_energy), deg]
                + [str(h) for h in m.hits]
                + [f"{100 * m.mean_hit_rate:.2f}%"]
            )
        out = [
            f"annealing: {self.trials} trial(s) x {p.num_reads} reads, {p.sweeps_per_read} sweeps, "
            f"beta {p.beta_initial:g} -> {p.beta_final:g}, seed {p.seed}",
            _render(rows, set(range(1, len(head)))),
            self.ratio_line(),
        ]
        if not (self.vanilla.exact_ground and self.congruence.exact_ground):
            out.append("* ground set taken from the lowest sampled energy (too many qubits to enumerate)")
        return "\n".join(out) + "\n"

    def csv(self) -> str:
        buf = _io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(
            ["model", "qubits", "nnz", "nnz_bound", "ground_energy", "degeneracy", "reads"]
            + [f"run_{t + 1}" for t in range(self.trials)]
            + ["mean_hit_rate"]
        )
        for m in (self.vanilla, self.congruence):
            w.writerow(
                [m.model, m.qubits, m.nnz, m.nnz_bound, repr(m.ground_energy), m.degeneracy, m.reads]
                + list(m.hits)
                + [repr(m.mean_hit_rate)]
            )
        return buf.getvalue()


def _summarize(Q: QuboMatrix, params: AnnealParams, trials: int, exact_limit: int) -> ModelSummary:
    results = run_trials(Q, params, trials)
    if Q.n <= exact_limit:
        exact = brute_force(Q, max_records=0)
        ground, reference, is_exact = exact.ground_energy, exact.ground_states, True
    else:
        ground = min(r.ground_energy for r in results)
        reference = sorted(
            {rec.assignment for r in results for rec in r.records if rec.energy <= ground + GROUND_ATOL}
        )
        is_exact = False
    hits = tuple(r.occurrences_of(reference) for r in results)
    sp = sparsity_report(Q)
    return ModelSummary(
        Q.model or "?", Q.n, sp.nnz, sp.bound, ground, len(reference), is_exact, hits, params.num_reads
    )


def compare(pf: ProblemFile, params: AnnealParams, trials: int = 3, exact_limit: int = 20) -> CompareReport:
    """Build both models and anneal them under identical budgets and seeds."""
    if trials < 1:
        raise ValueError("trials must be positive")
    v = _summarize(build_model(pf, "vanilla"), params, trials, exact_limit)
    c = _summarize(build_model(pf, "congruence"), params, trials, exact_limit)
    return CompareReport(v, c, params, trials)
