"""Command line: ``multigp solve FILE [options]``.

Exit codes: 0 every requested scenario certified; 1 a dual program is
infeasible; 2 the file is missing, malformed or invalid; 3 a solve did not
converge or could not be certified.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from . import __version__
from .errors import CapExceededError, ParseError
from .io import load_document, problem_to_dict
from .oracle import sweep_scenarios
from .pipeline import RunReport, solve_problem
from .report import render_report
from .scenario import Scenario
from .solver import SolverOptions


def _scenarios(text: str) -> list[Scenario]:
    if text.lower() == "all":
        return list(Scenario)
    try:
        return [Scenario.parse(text)]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="multigp",
        description="Geometric programs with {low, mid, high} parameters, solved via the dual.")
    parser.add_argument("--version", action="version", version=f"multigp {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    solve = sub.add_parser("solve", help="solve the L/M/U scenarios of a problem file")
    solve.add_argument("file", help="JSON problem document")
    solve.add_argument("--scenario", type=_scenarios, default=list(Scenario),
                       metavar="L|M|U|all", help="scenario to solve (default: all)")
    solve.add_argument("--tol", type=float, default=1e-8, help="KKT residual target")
    solve.add_argument("--max-iter", type=int, default=200, help="Newton step budget")
    solve.add_argument("--format", choices=("text", "json"), default="text")
    solve.add_argument("--oracle-check", action="store_true",
                       help="also solve each scenario with the primal log-space solver")
    solve.add_argument("--sweep", action="store_true",
                       help="solve every combination of triplet components")
    solve.add_argument("--workers", type=int, default=1, help="processes for --sweep")
    solve.add_argument("--seed", type=int, default=0, help="solver seed")
    solve.add_argument("--timing", action="store_true",
                       help="include wall times (makes the output non-reproducible)")
    return parser


def solve_command(args: argparse.Namespace) -> int:
    try:
        doc = load_document(args.file)
    except ParseError as exc:
        print(f"multigp: {exc}", file=sys.stderr)
        return 2
    try:
        opts = SolverOptions(tol=args.tol, max_iter=args.max_iter, seed=args.seed)
    except ValueError as exc:
        print(f"multigp: {exc}", file=sys.stderr)
        return 2
    for w in doc.warnings:
        print(f"multigp: warning: {w}", file=sys.stderr)

    report = RunReport(version=__version__, problem=problem_to_dict(doc.problem),
                       warnings=doc.warnings)
    report.scenarios = solve_problem(doc.problem, args.scenario, opts,
                                     oracle_check=args.oracle_check, timing=args.timing)
    if args.sweep:
        try:
            report.sweep = sweep_scenarios(doc.problem, opts, workers=args.workers)
        except CapExceededError as exc:
            report.sweep_error = str(exc)
            print(f"multigp: {exc}", file=sys.stderr)
    for r in report.scenarios:
        if r.message:
            print(f"multigp: scenario {r.scenario}: {r.status}: {r.message}", file=sys.stderr)
    sys.stdout.write(render_report(report, args.format))
    return report.exit_code()


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "solve":
        return solve_command(args)
    return 2  # pragma: no cover - argparse rejects unknown commands


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
