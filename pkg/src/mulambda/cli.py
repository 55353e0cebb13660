"""Command line interface: run experiments, trace runs, print thresholds."""
from __future__ import annotations

import argparse
import sys

from .harness import (ConfigError, load_config, run_experiment,
                      run_trace_experiment, write_outputs, write_trace_outputs)
from .theory import depth, eta, theta1, theta2, validate_params

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mulambda",
                                     description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (("run", "execute an experiment config"),
                            ("trace", "execute a tracing experiment config")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config", help="YAML experiment config file")
        p.add_argument("--out", default="results", help="output directory")
        p.add_argument("--workers", type=int, default=1, help="parallel workers")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("theory", help="print rate thresholds and depths as CSV")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=int, required=True)
    p.add_argument("--mu", type=int, required=True)
    p.add_argument("--A", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--pinc", type=float, required=True)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--jmax", type=int, required=True)

    p = sub.add_parser("validate", help="check a config file without running it")
    p.add_argument("config", help="YAML experiment config file")
    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    rows, summaries = run_experiment(config, workers=args.workers)
    written = write_outputs(rows, summaries, args.out, fmt=args.format)
    for path in written:
        print(path)
    return EXIT_OK


def _cmd_trace(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    traces = run_trace_experiment(config, workers=args.workers)
    written = write_trace_outputs(traces, args.out, fmt=args.format)
    for path in written:
        print(path)
    return EXIT_OK


def _cmd_theory(args: argparse.Namespace) -> int:
    result = validate_params(args.n, args.lam, args.mu, args.A, args.b,
                             args.pinc, delta=args.delta, epsilon=args.epsilon)
    if isinstance(result, list):
        for violation in result:
            print(f"constraint violated: {violation}", file=sys.stderr)
        return EXIT_CONFIG
    print("j,eta,theta1,theta2,depth")
    for j in range(args.jmax + 1):
        print(f"{j},{eta(result, j)!r},{theta1(result, j)!r},"
              f"{theta2(result, j)!r},{depth(result, j)}")
    return EXIT_OK


def _cmd_validate(args: argparse.Namespace) -> int:
    load_config(args.config)
    print("config ok")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"run": _cmd_run, "trace": _cmd_trace,
                "theory": _cmd_theory, "validate": _cmd_validate}
    try:
        return handlers[args.command](args)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
