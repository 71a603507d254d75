"""Command-line interface.

Exit codes: 0 success, 2 input error, 3 numeric failure (matrix not
symmetric or not positive semidefinite), 4 size guard exceeded.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from importlib import resources

import numpy as np

from .builder import sparsity_report
from .encoding import canonical_encode
from .errors import LinQuboError, NotPSD, NotRepresentable, NotSymmetric, SingularWarning, TooLarge
from .io import FORMAT_COO, FORMAT_JSON, read_problem, read_qubo, write_qubo
from .linalg import residual_norm_sq, solve_via_congruence
from .report import build_model, compare, decompose, occurrence_table, run_trials
from .solver import AnnealParams, brute_force

EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_SIZE = 4


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _fmt(a) -> str:
    return np.array2string(np.asarray(a), precision=12, suppress_small=True, floatmode="maxprec")


def _scale_arg(text: str):
    try:
        return [float(s) for s in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad scale {text!r}") from None


def _anneal_params(args) -> AnnealParams:
    return AnnealParams(args.reads, args.sweeps, args.beta_initial, args.beta_final, args.seed)


def cmd_diagonalize(args) -> int:
    pf = read_problem(_read_text(args.problem))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", SingularWarning)
        dec = decompose(pf, scale=args.scale)
    for w in caught:
        print(f"warning: SingularWarning: {w.message}")
    sys_ = pf.system
    y, x = solve_via_congruence(sys_, dec)
    print("R =")
    print(_fmt(dec.R))
    print(f"D = {_fmt(dec.D)}")
    print(f"y* = {_fmt(y)}")
    print(f"x* = {_fmt(x)}")
    print(f"residual ||Ax - b||^2 = {residual_norm_sq(sys_, x):.6g}")
    try:
        canonical_encode(pf.encoding, y)
        ok = "yes"
    except NotRepresentable:
        ok = "no"
    print(f"y* representable in encoding [{pf.low_exp}, {pf.high_exp}]: {ok}")
    return 0


def cmd_build(args) -> int:
    pf = read_problem(_read_text(args.problem))
    annihilate = {"on": True, "off": False, "default": None}[args.annihilate]
    Q = build_model(pf, args.model, annihilate)
    _write_text(args.output, write_qubo(Q, include_zeros=args.include_zeros, fmt=args.format))
    sp = sparsity_report(Q)
    dense = Q.n * (Q.n + 1) // 2
    ratio = sp.nnz / dense if dense else 0.0
    out = sys.stderr if args.output in (None, "-") else sys.stdout
    print(
        f"{Q.model}: {Q.n} qubits, nnz {sp.nnz} / bound {sp.bound}, "
        f"blocks {list(sp.block_sizes)}, ratio vs dense {sp.nnz}/{dense} = {ratio:.6f}",
        file=out,
    )
    return 0


def cmd_solve(args) -> int:
    Q = read_qubo(_read_text(args.qubo))
    if args.method == "exhaustive":
        results = [brute_force(Q, max_records=args.max_records)]
        table = occurrence_table(Q, results, levels=args.levels, collapse=args.collapse, exhaustive=True)
    else:
        results = run_trials(Q, _anneal_params(args), args.trials)
        table = occurrence_table(Q, results, levels=args.levels, collapse=args.collapse)
    sys.stdout.write(table.text())
    if args.csv:
        _write_text(args.csv, table.csv())
    return 0


def cmd_compare(args) -> int:
    pf = read_problem(_read_text(args.problem))
    report = compare(pf, _anneal_params(args), trials=args.trials, exact_limit=args.exact_limit)
    sys.stdout.write(report.text())
    if args.csv:
        _write_text(args.csv, report.csv())
    return 0


def cmd_export(args) -> int:
    Q = read_qubo(_read_text(args.qubo))
    _write_text(args.output, write_qubo(Q, include_zeros=args.include_zeros, fmt=args.format))
    return 0


def cmd_example(args) -> int:
    sys.stdout.write(resources.files("linqubo").joinpath("data/example_2x2.json").read_text())
    return 0


def _add_anneal_args(p, trials_default: int) -> None:
    p.add_argument("--reads", type=int, default=10000, help="anneals per trial")
    p.add_argument("--sweeps", type=int, default=100, help="sweeps per anneal")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=trials_default)
    p.add_argument("--beta-initial", type=float, default=0.05)
    p.add_argument("--beta-final", type=float, default=5.0)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="linqubo", description="QUBO formulations of linear systems."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("diagonalize", help="print R, D and the real minimizer")
    p.add_argument("problem")
    p.add_argument("--scale", type=_scale_arg, default=None, help="comma-separated column scales")
    p.set_defaults(func=cmd_diagonalize)

    p = sub.add_parser("build", help="build a QUBO file from a problem file")
    p.add_argument("problem")
    p.add_argument("output", nargs="?", default=None, help="output path (default stdout)")
    p.add_argument("--model", choices=["vanilla", "congruence"], default="congruence")
    p.add_argument("--annihilate", choices=["on", "off", "default"], default="default")
    p.add_argument("--include-zeros", action="store_true")
    p.add_argument("--format", choices=[FORMAT_JSON, FORMAT_COO], default=FORMAT_JSON)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("solve", help="solve a QUBO file and print the occurrence table")
    p.add_argument("qubo")
    p.add_argument("--method", choices=["exhaustive", "sa"], default="exhaustive")
    _add_anneal_args(p, trials_default=1)
    p.add_argument("--levels", type=int, default=1, help="energy levels to list")
    p.add_argument("--max-records", type=int, default=None, help="exhaustive: cap non-ground records")
    p.add_argument("--collapse", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--csv", default=None, help="also write the table as CSV")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("compare", help="anneal both models and compare")
    p.add_argument("problem")
    _add_anneal_args(p, trials_default=3)
    p.add_argument("--exact-limit", type=int, default=20, help="enumerate ground sets up to this many qubits")
    p.add_argument("--csv", default=None)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("export", help="re-export a QUBO file")
    p.add_argument("qubo")
    p.add_argument("output", nargs="?", default=None)
    p.add_argument("--include-zeros", action="store_true")
    p.add_argument("--format", choices=[FORMAT_JSON, FORMAT_COO], default=FORMAT_COO)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("example", help="print the bundled 2x2 example problem")
    p.set_defaults(func=cmd_example)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except TooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except (NotPSD, NotSymmetric) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (LinQuboError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
