"""Command line interface for the max-cut application.

Subcommands:
    solve   optimize the rank-r relaxation (optionally escalating the rank
            until certified) and round to a cut
    check   run the gradient and Hessian slope checks on the built problem

Exit codes: 0 success, 1 input error, 2 escalation requested but the
result could not be certified.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from ..diagnostics import check_gradient, check_hessian
from ..solvers import SolverOptions, history_to_csv
from .graph import Graph, laplacian, load_graph
from .solve import build_problem, rank_escalation, round_cut, solve_rank_r, certify


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="riemopt-maxcut",
        description="Max-cut via Riemannian optimization of the rank-r "
        "elliptope relaxation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve the relaxation and round to a cut")
    solve.add_argument("--graph", required=True, help="edge-list file")
    solve.add_argument("--rank", type=int, default=2, help="relaxation rank r")
    solve.add_argument(
        "--escalate", action="store_true", help="increase r until certified"
    )
    solve.add_argument("--trials", type=int, default=100, help="rounding trials")
    solve.add_argument("--tol", type=float, default=1e-6, help="certification tol")
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument("--solver", choices=("tr", "cg", "sd"), default="tr")
    solve.add_argument("--out", choices=("text", "json", "csv"), default="text")
    solve.add_argument("--history", help="write per-iteration CSV history here")
    solve.add_argument(
        "--timing",
        choices=("wall", "none"),
        default="wall",
        help="'none' reports zero elapsed times (reproducible output)",
    )
    solve.add_argument("--max-iter", type=int, default=1000)

    check = sub.add_parser("check", help="derivative checks on the built problem")
    check.add_argument("--graph", required=True)
    check.add_argument("--rank", type=int, default=2)
    check.add_argument("--seed", type=int, default=0)
    return parser


def _solver_options(args) -> SolverOptions:
    opts = SolverOptions(max_iter=args.max_iter)
    if args.timing == "none":
        opts.clock = lambda: 0.0
    return opts


def _emit_solve(args, g: Graph, result_fields: dict, histories) -> None:
    if args.history:
        records = [rec for run in histories for rec in run.history]
        history_to_csv(records, args.history)
    if args.out == "json":
        print(json.dumps(result_fields))
    elif args.out == "csv":
        print(",".join(result_fields.keys()))
        print(",".join("" if v is None else str(v) for v in result_fields.values()))
    else:
        for key, value in result_fields.items():
            print(f"{key}: {value}")


def run_cli(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1

    try:
        g = load_graph(args.graph)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    L = laplacian(g)
    rng = np.random.default_rng(args.seed)

    if args.command == "check":
        p = build_problem(L, args.rank)
        grad_report = check_gradient(p, rng=rng)
        hess_report = check_hessian(p, rng=rng)
        print("gradient check:")
        print(grad_report.summary())
        print("hessian check:")
        print(hess_report.summary())
        return 0 if (grad_report.verdict and hess_report.verdict) else 1

    opts = _solver_options(args)
    wall_start = time.perf_counter()
    if args.escalate:
        result = rank_escalation(
            L,
            r0=max(args.rank, 2),
            opts=opts,
            rng=rng,
            trials=args.trials,
            tol=args.tol,
            solver=args.solver,
        )
        histories = result.histories
        cost = histories[-1].cost_final
        cut, bound, certified = result.cut_value, result.upper_bound, result.certified
        rank_used = result.rank_used
        iterations = result.total_iterations
    else:
        Y, run = solve_rank_r(L, args.rank, opts, rng, solver=args.solver)
        histories = [run]
        _, cut = round_cut(L, Y, args.trials, rng)
        certified, bound = False, None
        try:
            certified, _, bound, _ = certify(L, Y, args.tol)
        except ValueError:
            pass
        cost = run.cost_final
        rank_used = args.rank
        iterations = len(run.history)

    elapsed = 0.0 if args.timing == "none" else time.perf_counter() - wall_start
    fields = {
        "n": g.n,
        "rank_used": rank_used,
        "cost": cost,
        "cut": cut,
        "bound": bound,
        "certified": certified,
        "seed": args.seed,
        "iterations": iterations,
        "time_seconds": elapsed,
    }
    _emit_solve(args, g, fields, histories)
    if args.escalate and not certified:
        return 2
    return 0


def main() -> None:
    sys.exit(run_cli())
