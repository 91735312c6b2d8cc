"""Command line entry point: ``belab <scenario> [--config PATH] [--out DIR] ...``."""

import argparse
import sys

from . import harness
from .errors import ConfigError


def build_parser():
    parser = argparse.ArgumentParser(prog="belab", description=__doc__)
    sub = parser.add_subparsers(dest="scenario", required=True)
    for name in harness.SCENARIOS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON experiment config")
        p.add_argument("--out", help="output directory (overrides $%s)" % harness.OUT_ENV)
        p.add_argument("--seed", type=int, help="unsigned 64-bit seed")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--budget", type=int, help="atom budget for exact enumeration")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = harness.load_config(args.config, scenario=args.scenario, seed=args.seed,
                                  budget=args.budget)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return harness.EXIT_CONFIG
    if args.threads < 1:
        print("config error: --threads must be >= 1", file=sys.stderr)
        return harness.EXIT_CONFIG
    result = harness.run(cfg, out=args.out, threads=args.threads)
    for line in result.messages:
        print(line)
    for path in result.files:
        print(f"wrote {path}")
    return result.code


if __name__ == "__main__":
    sys.exit(main())
