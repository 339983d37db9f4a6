"""qpbkit command line: run verification suites over scenario files."""
from __future__ import annotations

import argparse
import json
import sys
import traceback

from .fileformat import FormatError, parse_scenario
from .report import build_report, diff_golden, exit_status, to_json, to_text
from .suites import DESCRIPTIONS, SUITES, run_suite

EXIT_PASS, EXIT_FAIL, EXIT_PARSE, EXIT_INTERNAL = 0, 1, 2, 3


def _parser():
    p = argparse.ArgumentParser(prog="qpbkit", description="Exact checks for quantum principal bundles.")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a suite over a scenario file")
    r.add_argument("--suite", required=True, choices=SUITES + ["all"])
    r.add_argument("--input", required=True, help="scenario TOML file")
    r.add_argument("--format", choices=["json", "text"], default="text")
    r.add_argument("--golden", help="JSON report to compare against")
    sub.add_parser("list-suites", help="list suite names")
    return p


def run(args, out=sys.stdout, err=sys.stderr) -> int:
    try:
        with open(args.input, "rb") as fh:
            raw = fh.read()
    except OSError as e:
        print(f"error: {args.input}: cannot read file ({e.strerror})", file=err)
        return EXIT_PARSE
    golden = None
    if args.golden:
        try:
            with open(args.golden, encoding="utf-8") as fh:
                golden = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            print(f"error: golden file {args.golden}: {e}", file=err)
            return EXIT_PARSE
    try:
        sc = parse_scenario(raw, name=args.input)
        checks = run_suite(sc, args.suite)
    except FormatError as e:
        print(f"parse error: {args.input}: {e}", file=err)
        return EXIT_PARSE
    report = build_report(checks, raw, args.suite, sc.conductor)
    if golden is not None:
        diffs = diff_golden(report, golden)
        report["golden"] = {"equal": not diffs, "differences": diffs}
    out.write(to_json(report) if args.format == "json" else to_text(report))
    return exit_status(report)


def main(argv=None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as e:
        return EXIT_PARSE if e.code else EXIT_PASS
    if args.command == "list-suites":
        for s in SUITES + ["all"]:
            print(f"{s:12} {DESCRIPTIONS.get(s, 'every suite the input supports')}")
        return EXIT_PASS
    try:
        return run(args)
    except Exception:  # anything not covered by the contract is an internal error
        traceback.print_exc(file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
