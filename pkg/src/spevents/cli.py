"""Command-line interface: ``spevents run | verify | fmt``.

Exit codes: 0 success, 1 invalid scenario or failed verification, 2 parse
error or unreadable input. Errors are also written to stderr as one JSON
object with an ``"error"`` key.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import dsl
from .errors import ContradictionError, ParseError, UnknownNameError, ValidationError
from .eventgraph import BoundaryMode, build_partition, simulate
from .figures import BUILTIN_NAMES, builtin_text
from .report import run_report
from .svg import render_svg
from .verify import SUITE_NAMES, run_suite

EXIT_OK, EXIT_INVALID, EXIT_PARSE = 0, 1, 2


def _error(payload: dict, code: int) -> int:
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")
    return code


def _load_text(args) -> str:
    if args.builtin:
        return builtin_text(args.builtin)
    try:
        return Path(args.scenario).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ParseError(f"cannot read {args.scenario}: {exc.__class__.__name__}", 1, 1, "a readable UTF-8 scenario file")


def _emit(text: str, out):
    out.write(text)


def cmd_run(args, out) -> int:
    mode = BoundaryMode.parse(args.boundary)
    sc = dsl.parse(_load_text(args))
    trace = simulate(sc, rng=args.seed)
    part = build_partition(trace, mode)
    report = run_report(trace, part)
    if args.svg:
        render_svg(part, sc, args.svg)
    _emit(report.to_json() if args.format == "json" else report.to_text(), out)
    return EXIT_OK if report.passed else EXIT_INVALID


def cmd_verify(args, out) -> int:
    report = run_suite(args.suite)
    _emit(report.to_json() if args.format == "json" else report.to_text(), out)
    return EXIT_OK if report.passed else EXIT_INVALID


def cmd_fmt(args, out) -> int:
    sc = dsl.parse(_load_text(args))
    _emit(dsl.render(sc), out)
    return EXIT_OK


def _add_source(p: argparse.ArgumentParser):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("scenario", nargs="?", help="scenario file")
    src.add_argument("--builtin", metavar="NAME", help=f"built-in scenario: {', '.join(BUILTIN_NAMES)}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="spevents", description="Spacetime events of indivisible quantum states.")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate a scenario and partition it into spacetime events")
    _add_source(run)
    run.add_argument("--boundary", required=True, choices=[m.value for m in BoundaryMode],
                     help="which side of a cut owns the cut point (no default)")
    run.add_argument("--format", choices=("json", "text"), default="json")
    run.add_argument("--svg", metavar="PATH", help="also write the spacetime diagram")
    run.add_argument("--seed", type=int, help="sample undeclared outcomes with this seed")
    run.set_defaults(func=cmd_run)

    ver = sub.add_parser("verify", help="run the identity checks")
    ver.add_argument("--suite", choices=SUITE_NAMES, default="all")
    ver.add_argument("--format", choices=("json", "text"), default="json")
    ver.set_defaults(func=cmd_verify)

    fmt = sub.add_parser("fmt", help="print the canonical form of a scenario")
    _add_source(fmt)
    fmt.set_defaults(func=cmd_fmt)
    return ap


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except ParseError as exc:
        return _error(exc.to_dict(), EXIT_PARSE)
    except UnknownNameError as exc:
        return _error({"error": "lookup", "message": str(exc), "valid": list(BUILTIN_NAMES)}, EXIT_PARSE)
    except ValidationError as exc:
        return _error({"error": "validation", "violations": [v.to_dict() for v in exc.violations]}, EXIT_INVALID)
    except ContradictionError as exc:
        return _error({"error": "contradiction", "message": str(exc)}, EXIT_INVALID)
    except OSError as exc:
        return _error({"error": "io", "message": str(exc)}, EXIT_PARSE)


if __name__ == "__main__":
    sys.exit(main())
