"""Command line entry point: render a figure from one or more experiment CSVs."""

import argparse
import sys

from .plots import KINDS, PlotJob, VizError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="glwalk-viz",
        description="Render figures from glwalk experiment CSV files.",
    )
    parser.add_argument("kind", choices=KINDS, help="figure type to render")
    parser.add_argument("csv", nargs="+", help="input CSV file(s)")
    parser.add_argument("--out", required=True, help="output figure path (.png, .pdf)")
    parser.add_argument(
        "--n", type=int, default=None,
        help="walk length to select for cdf-overlay (default: largest present)",
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    options = {}
    if args.n is not None:
        options["n"] = args.n
    try:
        result = render(PlotJob(args.kind, list(args.csv), args.out, options))
    except (VizError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(result.out_path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
