"""Command-line front end.

Exit codes: 0 success, 1 feasibility failure, 2 argument error, 3 parse error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .bench import GenerationError, exit_status, generate, reports_to_csv, run_experiment
from .discretizer import reduce, reduced_to_dict
from .instance import InstanceParseError, dumps, instance_to_dict, load_instance
from .oracle import OracleCapError, OracleConfig, solve_exact
from .pipeline import PipelineConfig, solve
from .segment import AUTO, EXACT, HEURISTIC, SolverPolicy
from .solution import check_feasibility, solution_to_dict
from .wspd import build_wspd

EXIT_OK, EXIT_INFEASIBLE, EXIT_ARGS, EXIT_PARSE = 0, 1, 2, 3


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    p.add_argument("--epsilon", type=float, default=0.5, help="reduction accuracy (default 0.5)")
    p.add_argument("--mprp-mode", action="store_true", help="fixed-supply mode: skip the reduction")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--time-grid", type=int, default=4, help="oracle grid subdivisions per hour")
    p.add_argument("--out", type=Path, default=None, help="output file (directory for gen --count)")
    p.add_argument("--segment-mode", choices=[AUTO, EXACT, HEURISTIC], default=AUTO)
    p.add_argument("--exact-limit", type=int, default=12)
    p.add_argument("--subset-sum-pruning", action="store_true")
    p.add_argument("--max-iterations", type=int, default=50)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    # shared flags live on each subcommand so their defaults never clobber each other
    parser = argparse.ArgumentParser(prog="mprpvs", description=__doc__.splitlines()[0], allow_abbrev=False)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", parents=[common], allow_abbrev=False, help="generate seeded random instances")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--m", type=int, default=1)
    gen.add_argument("--T", type=int, default=8)
    gen.add_argument("--Q", type=int, default=None)
    gen.add_argument("--alpha", type=float, default=2.0)
    gen.add_argument("--spread", type=float, default=None)
    gen.add_argument("--constant-supply", action="store_true")
    gen.add_argument("--count", type=int, default=None, help="write COUNT files seed..seed+COUNT-1 into --out")

    for name, text in [("solve", "run the approximation pipeline"), ("oracle", "solve exactly (tiny instances)")]:
        p = sub.add_parser(name, parents=[common], allow_abbrev=False, help=text)
        p.add_argument("instance", type=Path)
        p.add_argument("--max-sites", type=int, default=8, help="oracle site cap")
        p.add_argument("--max-vehicles", type=int, default=2, help="oracle vehicle cap")
        if name == "solve":
            p.add_argument("--oracle", action="store_true", help="solve with the exact oracle instead")

    bench = sub.add_parser("bench", parents=[common], allow_abbrev=False, help="pipeline vs oracle report (CSV)")
    bench.add_argument("instances", type=Path, nargs="*")
    bench.add_argument("--no-oracle", action="store_true", help="use total supply as the reference")
    bench.add_argument("--workers", type=int, default=1)
    bench.add_argument("--timings", action="store_true", help="add wall-clock columns (not reproducible)")

    for name in ("dump-reduced", "dump-wspd"):
        p = sub.add_parser(name, parents=[common], allow_abbrev=False)
        p.add_argument("instance", type=Path)
    return parser


def _config(args) -> PipelineConfig:
    return PipelineConfig(
        epsilon=args.epsilon,
        policy=SolverPolicy(mode=args.segment_mode, exact_limit=args.exact_limit, time_grid=args.time_grid),
        mprp_mode=args.mprp_mode,
        subset_sum_pruning=args.subset_sum_pruning,
        max_iterations=args.max_iterations,
    )


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def _cmd_gen(args) -> int:
    def one(seed: int) -> str:
        inst = generate(seed, args.n, args.m, args.T, args.Q, args.alpha, args.spread,
                        constant_supply=args.constant_supply)
        data = instance_to_dict(inst)
        data["seed"] = seed
        return dumps(data)

    if args.count is None:
        _emit(one(args.seed), args.out)
        return EXIT_OK
    if args.out is None:
        raise ValueError("--count requires --out DIR")
    args.out.mkdir(parents=True, exist_ok=True)
    for seed in range(args.seed, args.seed + args.count):
        (args.out / f"inst_{seed:05d}.json").write_text(one(seed), encoding="utf-8")
    return EXIT_OK


def _cmd_solve(args) -> int:
    instance = load_instance(args.instance)
    if args.command == "oracle" or getattr(args, "oracle", False):
        solution = solve_exact(
            instance, OracleConfig(grid=args.time_grid, max_sites=args.max_sites, max_vehicles=args.max_vehicles)
        )
    else:
        solution, _ = solve(instance, _config(args))
    _emit(dumps(solution_to_dict(solution, instance)), args.out)
    return EXIT_INFEASIBLE if check_feasibility(solution, instance) else EXIT_OK


def _cmd_bench(args) -> int:
    oracle = None if args.no_oracle else OracleConfig(grid=args.time_grid)
    rows = run_experiment(args.instances, _config(args), oracle, workers=args.workers)
    _emit(reports_to_csv(rows, timings=args.timings), args.out)
    return exit_status(rows)


def _cmd_dump_reduced(args) -> int:
    instance = load_instance(args.instance)
    _emit(dumps(reduced_to_dict(reduce(instance, args.epsilon), instance.m)), args.out)
    return EXIT_OK


def _cmd_dump_wspd(args) -> int:
    instance = load_instance(args.instance)
    decomp = build_wspd({s.id: s.point for s in instance.sites}, math.sqrt(instance.m))
    pairs = [{"A": list(p.A), "B": list(p.B)} for p in decomp.pairs]
    _emit(json.dumps(pairs) + "\n", args.out)
    return EXIT_OK


COMMANDS = {
    "gen": _cmd_gen,
    "solve": _cmd_solve,
    "oracle": _cmd_solve,
    "bench": _cmd_bench,
    "dump-reduced": _cmd_dump_reduced,
    "dump-wspd": _cmd_dump_wspd,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except InstanceParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (OracleCapError, GenerationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS


if __name__ == "__main__":
    sys.exit(main())
