"""Command line interface for cohocalc."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .artifacts import read_text
from .config import configure_logging, load_settings
from .dsl import eval_program, parse
from .errors import CohocalcError
from .report import Report, render_text, reports_to_json
from .scenarios import SCENARIO_ORDER, describe_scenario, expand_scenarios, list_scenarios, run_scenarios
from .selfcheck import run_selfcheck

logger = logging.getLogger(__name__)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = load_settings().with_overrides(
            workers=getattr(args, "workers", None),
            property_trials=getattr(args, "trials", None),
            seed=getattr(args, "seed", None),
        )
        configure_logging(settings, verbose=args.verbose)
        if args.command == "eval":
            path = Path(args.file)
            program = parse(read_text(path))
            return _emit([eval_program(program, name=path.name)], args.json)
        if args.command == "repro":
            reports = run_scenarios(expand_scenarios(args.scenario), workers=settings.workers)
            return _emit(reports, args.json)
        if args.command == "selfcheck":
            report = run_selfcheck(trials=settings.property_trials, seed=settings.seed)
            return _emit([report], args.json)
        if args.command == "scenarios":
            if args.scenario_action == "list":
                for item in list_scenarios():
                    print(f"{item['id']}: {item['name']}")
                    print(f"  {item['description']}")
                return 0
            if args.scenario_action == "describe":
                print(describe_scenario(args.scenario))
                return 0
    except (CohocalcError, OSError) as exc:
        print(f"cohocalc error: {exc}", file=sys.stderr)
        return 2
    parser.print_help()
    return 2


def _emit(reports: list[Report], as_json: bool) -> int:
    if as_json:
        sys.stdout.write(reports_to_json(reports))
    else:
        sys.stdout.write("\n".join(render_text(report) for report in reports))
    passed = all(report.passed for report in reports)
    logger.debug("%d report(s), overall %s", len(reports), "pass" if passed else "fail")
    return 0 if passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cohocalc",
        description="Exact cohomology ring arithmetic and reproduction of nilpotent-cone degrees.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--verbose", action="store_true", help="Log debug records to stderr.")
    subparsers = parser.add_subparsers(dest="command", required=True)

    eval_parser = subparsers.add_parser("eval", parents=[common], help="Evaluate a .coh program.")
    eval_parser.add_argument("file", help="Path to a .coh file.")
    eval_parser.add_argument("--json", action="store_true", help="Print the report as JSON.")

    repro_parser = subparsers.add_parser("repro", parents=[common], help="Run a reproduction scenario.")
    repro_parser.add_argument("scenario", help=f"One of: {', '.join(SCENARIO_ORDER)}.")
    repro_parser.add_argument("--json", action="store_true", help="Print the report as JSON.")
    repro_parser.add_argument("--workers", type=int, default=None, help="Threads for 'repro all'. Default: COHOCALC_WORKERS or 1.")

    selfcheck_parser = subparsers.add_parser("selfcheck", parents=[common], help="Run the property suites over every built-in ring.")
    selfcheck_parser.add_argument("--json", action="store_true", help="Print the report as JSON.")
    selfcheck_parser.add_argument("--trials", type=int, default=None, help="Randomized triples per ring.")
    selfcheck_parser.add_argument("--seed", type=int, default=None, help="Seed for the randomized suites.")

    scenarios_parser = subparsers.add_parser("scenarios", parents=[common], help="List or describe reproduction scenarios.")
    scenario_actions = scenarios_parser.add_subparsers(dest="scenario_action", required=True)
    scenario_actions.add_parser("list", help="List scenarios.")
    describe_parser = scenario_actions.add_parser("describe", help="Describe one scenario.")
    describe_parser.add_argument("scenario", help="Scenario id.")
    return parser


if __name__ == "__main__":
    raise SystemExit(main())
