#!/usr/bin/env python3
"""
uncertainty-lab - Numerical laboratory for uncertainty relations

Run declarative scenarios for finite-dimensional observables, the particle
in a box and PT-symmetric models, and write JSON/CSV reports.

Usage:
    python main.py run --builtin pauli_phi1
    python main.py run --scenario scenarios/xm_bound_cos_ground.json --format csv
    python main.py list
    python main.py check
"""

import argparse
import logging
import sys
from pathlib import Path

from src.config import get_config
from src.errors import SchemaError
from src.pipeline import ScenarioPipeline, run_scenarios
from src.reports import write_records
from src.scenarios import (
    list_builtin_scenarios,
    load_builtin,
    load_builtin_scenarios,
    load_scenarios,
)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Run uncertainty-relation scenarios and write machine-readable reports",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
    # Run a bundled scenario
    python main.py run --builtin gellmann_real_family

    # Run a scenario file with another seed, as CSV
    python main.py run --scenario my_scenarios.json --seed 7 --format csv --out outputs/my.csv

    # List bundled scenarios
    python main.py list

    # Run every bundled scenario and check its embedded assertions
    python main.py check --workers 8
        """
    )
    parser.add_argument(
        "-v", "--verbose",
        action="store_true",
        help="Log pipeline steps (overrides UNCERTAINTY_LOG_LEVEL)"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    run = subparsers.add_parser("run", help="Run one scenario file or bundled scenario")
    source = run.add_mutually_exclusive_group(required=True)
    source.add_argument("--scenario", type=Path, help="Path to a scenario JSON file")
    source.add_argument("--builtin", type=str, help="Id of a bundled scenario")
    run.add_argument("--out", type=Path, help="Report path (default: outputs/<scenario_id>.<format>)")
    run.add_argument("--format", choices=["json", "csv"], help="Report format (default: from the scenario)")
    run.add_argument("--seed", type=int, help="Override the scenario seed")
    run.add_argument("--no-timing", action="store_true", help="Omit wall_time_ms from JSON reports")

    subparsers.add_parser("list", help="List bundled scenarios")

    check = subparsers.add_parser("check", help="Run every bundled scenario and check assertions")
    check.add_argument("--workers", type=int, help="Concurrent scenarios (default: UNCERTAINTY_WORKERS)")

    return parser


def setup_logging(verbose: bool) -> None:
    level = "INFO" if verbose else get_config().log_level.upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def print_result(result) -> None:
    if result.success and result.checks_passed:
        target = f" -> {result.output_path}" if result.output_path else ""
        print(f"  ✓ {result.scenario_id} ({len(result.records)} records){target}")
    elif result.success:
        print(f"  ✗ {result.scenario_id}: failed checks {', '.join(result.failed_checks)}")
    else:
        print(f"  ✗ {result.scenario_id}: {result.error}")


def command_run(args) -> int:
    try:
        scenarios = load_scenarios(args.scenario) if args.scenario else [load_builtin(args.builtin)]
    except SchemaError as e:
        print(f"✗ Invalid scenario: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"✗ Could not read scenario file: {e}", file=sys.stderr)
        return EXIT_USAGE

    if not scenarios:
        print("No scenarios to run.")
        if args.out:
            write_records([], args.out, args.format or "json")
        return EXIT_OK

    # A single --out with several scenarios receives the combined records.
    combined = args.out is not None and len(scenarios) > 1
    pipeline = ScenarioPipeline()
    results = []
    for scenario in scenarios:
        results.append(pipeline.run(
            scenario,
            output_path=None if combined else args.out,
            fmt=args.format,
            seed=args.seed,
            include_timing=not args.no_timing,
            write=not combined,
        ))
        print_result(results[-1])

    if combined and all(r.success for r in results):
        records = [record for r in results for record in r.records]
        kinds = {scenario.kind.value for scenario in scenarios}
        kind = kinds.pop() if len(kinds) == 1 else None
        write_records(records, args.out, args.format or scenarios[0].output.format, kind, not args.no_timing)
        print(f"  Combined report: {args.out}")

    if any(r.error_kind == "schema" for r in results):
        return EXIT_USAGE
    return EXIT_OK if all(r.checks_passed for r in results) else EXIT_FAILURE


def command_list() -> int:
    try:
        entries = list_builtin_scenarios()
    except SchemaError as e:
        print(f"✗ Bundled scenarios are invalid: {e}", file=sys.stderr)
        return EXIT_USAGE
    print("Bundled scenarios:")
    print("-" * 60)
    for scenario_id, description in entries:
        print(f"  {scenario_id:34} {description}")
    return EXIT_OK


def command_check(args) -> int:
    config = get_config()
    issues = config.validate()
    if issues:
        for issue in issues:
            print(f"  ⚠ {issue}")
        return EXIT_USAGE
    try:
        scenarios = load_builtin_scenarios()
    except SchemaError as e:
        print(f"✗ Bundled scenarios are invalid: {e}", file=sys.stderr)
        return EXIT_USAGE

    print(f"Checking {len(scenarios)} bundled scenarios...")
    results = run_scenarios(scenarios, workers=args.workers, write=False)
    for result in results:
        print_result(result)

    failed = [r for r in results if not r.checks_passed]
    invalid = [r for r in results if r.error_kind == "schema"]
    if invalid:
        print(f"\n✗ {len(invalid)} bundled scenarios are invalid")
        return EXIT_USAGE
    if failed:
        print(f"\n✗ {len(failed)} of {len(results)} scenarios failed")
        return EXIT_FAILURE
    print(f"\n✓ All {len(results)} scenarios passed")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.verbose)

    if args.command == "run":
        return command_run(args)
    if args.command == "list":
        return command_list()
    return command_check(args)


if __name__ == "__main__":
    sys.exit(main())
