"""``verify <suite>``: run a verification suite and print its report."""

from __future__ import annotations

import argparse
import datetime
import json
import sys

from .report import SUITES, Options, list_checks, run_suite


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="verify", description="Run exact verification suites.")
    p.add_argument("suite", nargs="?", choices=list(SUITES) + ["all"])
    p.add_argument("--json", action="store_true", help="emit the report as JSON")
    p.add_argument("--n-max", type=int, default=20, help="largest n in the iota_n family (default 20)")
    p.add_argument("--oracle-depth", type=int, default=8, help="word length bound for the search oracle")
    p.add_argument("--list", action="store_true", help="list check ids with citations and exit")
    p.add_argument("--timestamps", action="store_true", help="add a generation time to JSON output")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    if args.n_max < 0 or args.oracle_depth < 0:
        parser.error("--n-max and --oracle-depth must be non-negative")
    opts = Options(n_max=args.n_max, oracle_depth=args.oracle_depth)
    if args.list:
        checks = list_checks(opts)
        if args.json:
            print(json.dumps([{"id": i, "citation": c} for i, c in checks], indent=2, ensure_ascii=False))
        else:
            for i, c in checks:
                print(f"{i}\t{c}")
        return 0
    if args.suite is None:
        parser.error("a suite name is required")
    report = run_suite(args.suite, opts)
    if args.json:
        data = report.to_json()
        if args.timestamps:
            data["generated_at"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
        print(json.dumps(data, indent=2, ensure_ascii=False))
    else:
        print(report.table())
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
