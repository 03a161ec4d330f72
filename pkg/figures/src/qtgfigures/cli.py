"""Command line front end: one records CSV in, one figure out."""

from __future__ import annotations

import argparse
import sys

from .render import PlotError, PlotSpec, render_scatter


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qtg-plot",
        description="render a log-log comparison scatter from a benchmark "
                    "records CSV",
    )
    parser.add_argument("records_csv", help="records.csv from a benchmark run")
    parser.add_argument("--out", default="figure.png", help="output image path")
    parser.add_argument(
        "--coords-out", default=None,
        help="sidecar CSV of plotted coordinates "
             "(default: derived from --out)",
    )
    parser.add_argument("--no-identity-line", action="store_true",
                        help="skip the parity diagonal")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = PlotSpec(
        csv_path=args.records_csv,
        out_path=args.out,
        coords_path=args.coords_out,
        identity_line=not args.no_identity_line,
    )
    try:
        result = render_scatter(spec)
    except (PlotError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    print(f"wrote {result.out_path} ({len(result.points)} points)")
    print(f"coords {result.coords_path}")
    if result.clamped:
        print(f"clamped {result.clamped} nonpositive values to the log floor")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
