"""Command-line entry point.

    minimax-ope solve-subset --target 0.5,0.5 --behavior 0.9,0.1 --n 100
    minimax-ope experiment switch-scaling --trials 10000 --out switch.csv
    minimax-ope ingest-ratings --ratings ratings.csv --out movies.json
"""

from __future__ import annotations

import argparse
import csv
import sys

from . import __version__
from .analysis import ESTIMATOR_NAMES, make_estimator
from .bandit import BanditInstance, Dataset, validate_policy
from .config import load_config
from .errors import ConfigParse, OPEError, UnknownSubcommand
from .experiments import (
    EXPERIMENTS,
    chebyshev_scaling_instance,
    run_experiment,
    switch_scaling_instance,
)
from .ratings import RatingsInstanceSpec, ingest_ratings, load_instance, save_instance
from .results import format_rows, write_result
from .sampler import SeedSpec, draw_dataset
from .subset import solve_optimal_subset

SUBCOMMANDS = ("simulate", "estimate", "solve-subset", "experiment", "ingest-ratings")
BUILTIN_INSTANCES = {"switch-scaling": switch_scaling_instance,
                     "chebyshev-scaling": chebyshev_scaling_instance}


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _Usage(message)


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(",") if x.strip())


def build_parser() -> argparse.ArgumentParser:
    # SUPPRESS so a subparser does not reset flags given before the subcommand
    common = _Parser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="flat key = value config file")
    common.add_argument("--seed", type=int, help="base seed (64-bit)")
    common.add_argument("--trials", type=int)
    common.add_argument("--k", type=_ints, help="comma-separated k values")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--estimator", choices=ESTIMATOR_NAMES + ("zero",))

    p = _Parser(prog="minimax-ope", parents=[common],
                description="Off-policy evaluation estimators and experiments.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    sim = sub.add_parser("simulate", parents=[common], help="draw one logged dataset")
    _instance_args(sim)
    sim.add_argument("--n", type=float, required=True)
    sim.add_argument("--mode", choices=("multinomial", "poisson"), default="multinomial")
    sim.add_argument("--trial", type=int, default=0)

    est = sub.add_parser("estimate", parents=[common], help="evaluate estimators on a dataset")
    _instance_args(est)
    est.add_argument("--data", required=True, help="CSV with action,reward columns")
    est.add_argument("--n", type=float, help="sample size or Poisson rate (default: rows)")
    est.add_argument("--mode", choices=("multinomial", "poisson"), default="multinomial")

    sol = sub.add_parser("solve-subset", parents=[common], help="optimal plug-in subset")
    sol.add_argument("--target", type=_floats)
    sol.add_argument("--behavior", type=_floats)
    sol.add_argument("--instance")
    sol.add_argument("--n", type=float, required=True)

    exp = sub.add_parser("experiment", parents=[common], help="run an experiment driver")
    exp.add_argument("name", choices=EXPERIMENTS)
    exp.add_argument("--workers", type=int)
    exp.add_argument("--s-stride", type=int, dest="s_stride")

    ing = sub.add_parser("ingest-ratings", parents=[common], help="build an instance file")
    ing.add_argument("--ratings", required=True)
    ing.add_argument("--movie-count", type=int, default=500)
    ing.add_argument("--min-ratings", type=int, default=10)
    ing.add_argument("--scale", type=float, default=5.0)
    ing.add_argument("--r-max", type=float, default=1.0)
    return p


def _instance_args(p):
    p.add_argument("--instance", help="instance JSON file")
    p.add_argument("--builtin", choices=tuple(BUILTIN_INSTANCES),
                   help="use an experiment's instance at the first --k")


def _instance(args) -> BanditInstance:
    if args.instance:
        return load_instance(args.instance)
    if args.builtin and args.k:
        return BUILTIN_INSTANCES[args.builtin](args.k[0])
    raise _Usage("give --instance or --builtin with --k")


def _emit(text: str, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_simulate(args) -> int:
    inst = _instance(args)
    d = draw_dataset(inst, args.n, SeedSpec(args.seed or 0, args.trial), args.mode)
    lines = ["action,reward"] + [f"{a},{r:.17g}" for a, r in d.pairs]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_estimate(args) -> int:
    inst = _instance(args)
    with open(args.data, newline="") as fh:
        pairs = [(int(row["action"]), float(row["reward"])) for row in csv.DictReader(fh)]
    d = Dataset.from_pairs(pairs, inst.k, args.n, args.mode, inst.r_max)
    names = (args.estimator,) if args.estimator else ESTIMATOR_NAMES
    lines = ["estimator,value"]
    for name in names:
        value = make_estimator(name, inst, d.n)(d)
        lines.append(f"{name},{value:.17g}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_solve_subset(args) -> int:
    if args.instance:
        inst = load_instance(args.instance)
        target, behavior = inst.target, inst.behavior
    elif args.target and args.behavior:
        target, behavior = validate_policy(args.target), validate_policy(args.behavior)
    else:
        raise _Usage("give --target and --behavior, or --instance")
    sol = solve_optimal_subset(target, behavior, args.n)
    text = (f"S* = {{{', '.join(str(int(a)) for a in sol.s_star)}}}\n"
            f"c = {sol.c:.17g}\n"
            f"dual value = {sol.dual_value:.17g}\n"
            f"epsilon = {sol.epsilon:.17g}\n")
    _emit(text, args.out)
    return 0


def cmd_experiment(args) -> int:
    config = load_config(args.config, experiment=args.name, k_values=args.k,
                         trials=args.trials, base_seed=args.seed, output_path=args.out,
                         workers=args.workers, s_stride=args.s_stride)
    result = run_experiment(config)
    if config.output_path:
        write_result(result, config.output_path)
    else:
        sys.stdout.write(format_rows(result.rows))
    return 0


def cmd_ingest_ratings(args) -> int:
    spec = RatingsInstanceSpec(args.ratings, args.movie_count, args.min_ratings, args.scale,
                               args.seed or 0, args.r_max)
    ratings = ingest_ratings(spec)
    if args.out:
        save_instance(ratings.instance, args.out, ratings.movie_ids)
    else:
        sys.stdout.write(f"k = {ratings.instance.k}, pool = {ratings.pool_actions.size}\n")
    return 0


COMMANDS = {"simulate": cmd_simulate, "estimate": cmd_estimate,
            "solve-subset": cmd_solve_subset, "experiment": cmd_experiment,
            "ingest-ratings": cmd_ingest_ratings}


def run(argv=None) -> int:
    """Parse ``argv`` and dispatch; returns the process exit status.

    Unknown subcommands raise :class:`UnknownSubcommand`; config errors raise
    :class:`ConfigParse`.  Use :func:`main` for printed errors and exit codes.
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except _Usage as exc:
        if "invalid choice" in str(exc) and "argument command" in str(exc):
            raise UnknownSubcommand(str(exc)) from None
        raise
    for name in ("config", "seed", "trials", "k", "out", "estimator"):
        if not hasattr(args, name):
            setattr(args, name, None)
    if args.command is None:
        raise UnknownSubcommand(f"expected one of {', '.join(SUBCOMMANDS)}")
    return COMMANDS[args.command](args)


def main(argv=None) -> int:
    try:
        return run(argv)
    except (_Usage, UnknownSubcommand, ConfigParse) as exc:
        print(f"minimax-ope: error: {exc}", file=sys.stderr)
        return 2
    except (OPEError, OSError) as exc:
        print(f"minimax-ope: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
