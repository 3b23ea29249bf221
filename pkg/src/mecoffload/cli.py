"""Command-line entry point.

    mecoffload converge    --config exp.yaml --out trace.csv
    mecoffload sweep       --config exp.yaml --replicas 5 --out sweep.csv
    mecoffload cap-compare --config exp.yaml --out cap.csv
    mecoffload oracle      --config exp.yaml --out oracle.csv
    mecoffload eval        --config exp.yaml --out eval.csv

Without ``--out`` the CSV goes to stdout.
"""
from __future__ import annotations

import argparse
import logging
import sys

from . import experiments as ex


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="experiment YAML file")
    common.add_argument("--seed", type=int, help="base seed (unsigned 64-bit)")
    common.add_argument("--replicas", type=int, help="number of seeds")
    common.add_argument("--out", metavar="PATH", help="output CSV path")
    common.add_argument("--jobs", type=int, help="worker processes")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="mecoffload", description="MEC offloading experiments")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("converge", parents=[common], help="DQN convergence traces")
    sw = sub.add_parser("sweep", parents=[common], help="final cost versus a system parameter")
    sw.add_argument("--variable", choices=ex.SWEEP_VARIABLES)
    sw.add_argument("--values", type=float, nargs="+")
    sw.add_argument("--strategies", nargs="+", choices=ex.STRATEGIES)
    sub.add_parser("cap-compare", parents=[common], help="max-min versus random CAP selection")
    sub.add_parser("oracle", parents=[common], help="grid-search optimum per channel draw")
    sub.add_parser("eval", parents=[common], help="All-Local / All-CAP cost breakdown")
    return p


def _spec(args) -> ex.ExperimentSpec:
    if args.seed is not None and not 0 <= args.seed < 2**64:
        raise ValueError("--seed must be an unsigned 64-bit integer")
    overrides = dict(base_seed=args.seed, replicas=args.replicas, output=args.out, jobs=args.jobs)
    if args.command == "sweep":
        overrides.update(sweep_variable=args.variable, sweep_values=args.values,
                         strategies=args.strategies)
    if args.config:
        return ex.ExperimentSpec.load(args.config, **overrides)
    return ex.ExperimentSpec.from_dict({}, **overrides)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        spec = _spec(args)
        if args.command == "converge":
            text = ex.run_convergence(spec)
        elif args.command == "sweep":
            text = ex.run_sweep(spec)
        elif args.command == "cap-compare":
            text = ex.run_cap_compare(spec)[0]
        elif args.command == "oracle":
            text = ex.run_oracle(spec)
        else:
            text = ex.run_eval(spec)
    except (OSError, ValueError, TypeError, RuntimeError) as exc:
        print(f"mecoffload: error: {exc}", file=sys.stderr)
        return 1
    if not spec.output:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
