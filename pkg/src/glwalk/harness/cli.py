"""Command line entry point.

Usage: glwalk <subcommand> <config> [--seed N] [--threads K] [--out DIR]

Subcommands: check, spectral, bias, walk, edgeworth, berry-esseen,
sandwich.  The config file carries all numeric parameters; the flags
override the corresponding [run] keys.
"""

import argparse
import sys

from .config import THREADS_ENV, ConfigError, load_config
from .runs import RUNNERS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="glwalk",
        description="Spectral and Monte Carlo experiments for random matrix products",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in RUNNERS.items():
        doc = (fn.__doc__ or "").strip().splitlines()
        p = sub.add_parser(name, help=doc[0] if doc else None)
        p.add_argument("config", help="path to the experiment config file")
        p.add_argument("--seed", type=int, default=None, help="override [run] seed")
        p.add_argument(
            "--threads", type=int, default=None,
            help=f"worker threads (default: [run] threads or ${THREADS_ENV})",
        )
        p.add_argument("--out", default=None, help="override the output directory")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
        if args.threads is not None:
            cfg.threads = args.threads
        if args.out is not None:
            cfg.out_dir = args.out
        cfg.validate()
        path = RUNNERS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
