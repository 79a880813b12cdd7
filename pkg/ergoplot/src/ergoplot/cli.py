"""Command line: ``ergoplot --in <csv> --out <img> [--kind auto]``."""

from __future__ import annotations

import argparse
import sys

from .reader import DataFileError
from .render import FigureKind, FigureSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ergoplot",
        description="Render an ergokit experiment CSV as a figure.",
    )
    parser.add_argument("--in", dest="input_csv", required=True, help="experiment CSV produced by ergokit")
    parser.add_argument("--out", dest="output_image", required=True, help="output image path (.png/.svg/.pdf)")
    parser.add_argument(
        "--kind",
        choices=["auto"] + [k.value for k in FigureKind],
        default="auto",
        help="figure kind; 'auto' reads it from the CSV metadata (default)",
    )
    parser.add_argument("--dpi", type=int, default=150)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    kind = None if args.kind == "auto" else FigureKind(args.kind)
    spec = FigureSpec(
        input_csv=args.input_csv,
        output_image=args.output_image,
        figure_kind=kind,
        dpi=args.dpi,
    )
    try:
        result = render(spec)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DataFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {result.output_image} ({result.figure_kind.value}: {', '.join(result.series_drawn)})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
