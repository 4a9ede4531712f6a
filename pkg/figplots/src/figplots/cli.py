"""figplots command line: render <figure> --in <csv> --out <img>."""

from __future__ import annotations

import argparse
import sys

from .render import FIGURES, SchemaError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="figplots", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one figure from a sweep CSV")
    p.add_argument("figure", choices=sorted(FIGURES))
    p.add_argument("--in", dest="csv_path", required=True, help="input sweep CSV")
    p.add_argument("--out", dest="out_path", required=True, help="output image (.png or .svg)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        render(args.figure, args.csv_path, args.out_path)
    except (SchemaError, OSError) as exc:
        sys.stderr.write(f"figplots: error: {exc}\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
