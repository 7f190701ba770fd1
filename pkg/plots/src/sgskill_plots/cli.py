"""Command-line entry point: `sgskill-render`.

Exit codes: 0 all requested figures rendered (warnings allowed), 1 usage
error, 2 one or more figures failed (the rest still render).
"""

from __future__ import annotations

import argparse
import sys

from .figures import FIGURE_IDS, FigureInputError, FigureStyle
from .render import VALID_FORMATS, render

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FIGURE = 2


def build_parser() -> argparse.ArgumentParser:
    ids = ", ".join(sorted(FIGURE_IDS))
    parser = argparse.ArgumentParser(
        prog="sgskill-render",
        description="Render figures from an sgskill report directory (read-only).",
    )
    parser.add_argument("--manifest", required=True, help="path to report manifest.json")
    parser.add_argument(
        "--figs",
        required=True,
        help=f"comma-separated figure ids, or 'all' ({ids})",
    )
    parser.add_argument("--out", required=True, help="output directory for images")
    parser.add_argument("--format", choices=VALID_FORMATS, default="png")
    parser.add_argument("--bins", type=int, default=20, help="bins for raw-value histograms")
    parser.add_argument(
        "--point-scale", type=float, default=4.0, help="marker area per sqrt(holes played)"
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.figs == "all":
        figure_ids = sorted(FIGURE_IDS)
    else:
        figure_ids = [f.strip() for f in args.figs.split(",") if f.strip()]
    style = FigureStyle(bins=args.bins, point_scale=args.point_scale)
    try:
        result = render(args.manifest, figure_ids, args.out, args.format, style)
    except (FigureInputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    for warning in result.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    for path in result.written:
        print(path)
    if result.failures:
        for fid, reason in sorted(result.failures.items()):
            print(f"failed: {fid}: {reason}", file=sys.stderr)
        return EXIT_FIGURE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
