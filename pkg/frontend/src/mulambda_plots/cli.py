"""Command line entry points for the two figure kinds."""
from __future__ import annotations

import argparse
import sys

from .csvio import SchemaError
from .figures import plot_runtime_vs_k, plot_trajectory

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_RUNTIME = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mulambda-plot",
                                     description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("trajectory", help="rate-per-fitness figure")
    p.add_argument("--in", dest="in_csv", required=True,
                   help="trace-summary CSV")
    p.add_argument("--out", dest="out_svg", required=True, help="SVG path")
    p.add_argument("--overlay-label", default=None)

    p = sub.add_parser("runtime", help="runtime-versus-k figure")
    p.add_argument("--in", dest="in_csv", required=True, help="summary CSV")
    p.add_argument("--out", dest="out_svg", required=True, help="SVG path")
    p.add_argument("--logx", action="store_true")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "trajectory":
            path = plot_trajectory(args.in_csv, args.out_svg,
                                   overlay_label=args.overlay_label)
        else:
            path = plot_runtime_vs_k(args.in_csv, args.out_svg, logx=args.logx)
        print(path)
        return EXIT_OK
    except (SchemaError, FileNotFoundError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
