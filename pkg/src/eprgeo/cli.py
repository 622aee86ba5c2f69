"""Command line interface.

    eprgeo run <scenario-file> [--strict] [--format table|csv] [--out PATH]

Exit codes: 0 on success, 1 on a validation problem (unreadable or
malformed scenario), 2 on a numerical failure (a leg could not be built),
3 when --strict is given and a diagnostic exceeded its tolerance.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .errors import ConfigurationError, UsageError
from .report import emit_report
from .scenario import parse_scenario, run_scenario

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2
EXIT_STRICT = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eprgeo",
        description="Spin correlations for geodesic particle pairs in curved spacetime.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a scenario file and print its report")
    run.add_argument("scenario", help="path to the scenario file")
    run.add_argument(
        "--strict",
        action="store_true",
        help="exit 3 if any diagnostic exceeds its tolerance",
    )
    run.add_argument(
        "--format",
        choices=("table", "csv"),
        default=None,
        help="output format (default: the scenario's [output] format, else table)",
    )
    run.add_argument(
        "--out",
        default=None,
        metavar="PATH",
        help="write the report here instead of stdout",
    )
    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    try:
        with open(args.scenario, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read scenario: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        sc = parse_scenario(text)
    except (ConfigurationError, UsageError) as exc:
        print(f"error: {args.scenario}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    report = run_scenario(sc)

    fmt = args.format or sc.out_format
    out_path = args.out or sc.out_path
    rendered = emit_report(report, fmt)
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(rendered)
    else:
        sys.stdout.write(rendered)

    if report.has_failures:
        return EXIT_NUMERICAL
    if args.strict and not report.diagnostics_ok:
        return EXIT_STRICT
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    raise UsageError(f"unknown command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
