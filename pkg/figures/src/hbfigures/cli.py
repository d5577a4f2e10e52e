"""CLI for figure regeneration: hb-figures --kind KIND --in CSV --out IMAGE."""

import argparse
import sys

from .render import SCHEMAS, EmptyDataError, FigureSpec, SchemaError, render


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hb-figures",
        description="Render a figure from a horizonbattery CSV table.",
    )
    parser.add_argument("--kind", required=True, choices=sorted(SCHEMAS))
    parser.add_argument("--in", dest="input_csv", required=True, metavar="CSV")
    parser.add_argument("--out", dest="output_path", required=True, metavar="IMAGE")
    parser.add_argument("--title", default="")
    parser.add_argument("--three-d", action="store_true",
                        help="3-d bars instead of a heatmap (storage-surface only)")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    spec = FigureSpec(
        kind=args.kind,
        input_csv=args.input_csv,
        output_path=args.output_path,
        title=args.title,
        three_d=args.three_d,
    )
    try:
        path = render(spec)
    except (SchemaError, EmptyDataError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
