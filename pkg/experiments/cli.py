#!/usr/bin/env python3
"""
transportlab CLI

Command-line interface for transforms, verification suites and experiments.

Exit codes: 0 success, 1 failed assertion or numerical error, 2 usage,
format or configuration error, 3 unusable reference density.
"""

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Optional

from experiments.config_loader import ExperimentLoader, with_overrides
from experiments.run_manifest import RunManifest, config_digest
from experiments.runner import RUNNERS, run_experiment
from experiments.suites import SUITES, SuiteResult, run_suite
from signal_core.density import uniform_signal
from signal_core.errors import BadReference, ConfigError, GridError, SignalFormatError, TransportLabError
from signal_core.io import atomic_write_text, format_map1d, read_signal
from transforms.cdt import cdt_forward

OUTPUT_DIR_ENV = "TRANSPORTLAB_OUTPUT_DIR"

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_BAD_REFERENCE = 3

logger = logging.getLogger(__name__)


def setup_logging(verbose: bool = False):
    """Setup logging configuration."""
    level = logging.DEBUG if verbose else logging.INFO
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )


def resolve_output_dir(out: Optional[str]) -> Optional[Path]:
    """--out first, then the TRANSPORTLAB_OUTPUT_DIR environment variable."""
    value = out or os.getenv(OUTPUT_DIR_ENV)
    return Path(value) if value else None


def cmd_cdt(args) -> int:
    """Transform a signal file against a reference file or the uniform reference"""
    p = read_signal(args.input)
    r = uniform_signal(p.grid) if args.ref == "uniform" else read_signal(args.ref)
    manifest = RunManifest(command="cdt", config_digest=config_digest({"in": args.input, "ref": args.ref}),
                           seed=None)
    T = cdt_forward(p, r)
    text = format_map1d(T.grid, T.values)
    if args.out:
        out_path = atomic_write_text(args.out, text)
        manifest.add_output(out_path)
        manifest.finish(EXIT_OK)
        manifest.write(out_path.parent)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def print_suite_result(result: SuiteResult):
    """Print formatted suite result"""
    status = "✅ PASS" if result.success else "❌ FAIL"
    print(f"   Status: {status}")
    print(f"   Cases: {len(result.rows)}")
    print(f"   Max gap: {result.max_gap:.3g} (tolerance {result.tolerance:.3g})")
    print(f"   Execution time: {result.execution_time_seconds:.2f}s")
    for key, value in result.notes.items():
        print(f"   {key}: {value:.3g}")


def cmd_verify(args) -> int:
    """Run a named verification suite"""
    out_dir = resolve_output_dir(args.out)
    manifest = RunManifest(command=f"verify {args.suite}",
                           config_digest=config_digest({"suite": args.suite, "grid_n": args.grid_n}),
                           seed=args.seed)

    print(f"\nRunning suite: {args.suite}")
    print("-" * 60)
    result = run_suite(args.suite, seed=args.seed, grid_n=args.grid_n)
    print_suite_result(result)

    if out_dir is not None:
        manifest.add_output(atomic_write_text(out_dir / f"{args.suite}.csv", result.to_csv()))
    else:
        sys.stdout.write(result.to_csv())

    exit_code = EXIT_OK if result.success else EXIT_FAILED
    if not result.success:
        logger.error(f"Suite {args.suite} failed")
        print(json.dumps({"suite": args.suite, "failing_case": result.failing_case}, default=str), file=sys.stderr)
    if out_dir is not None:
        manifest.finish(exit_code)
        manifest.write(out_dir)
    return exit_code


def cmd_experiment(args) -> int:
    """Run a named experiment and write its CSV files"""
    out_dir = resolve_output_dir(args.out)
    if out_dir is None:
        print(f"Error: experiment needs --out or {OUTPUT_DIR_ENV}", file=sys.stderr)
        return EXIT_USAGE

    loader = ExperimentLoader()
    config = loader.load_config(args.config) if args.config else loader.load_builtin(args.name)
    if config.experiment != args.name:
        raise ConfigError(f"Config describes '{config.experiment}', not '{args.name}'")
    config = with_overrides(config, seed=args.seed, grid_n=args.grid_n)

    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(command=f"experiment {args.name}", config_digest=config_digest(config), seed=config.seed)

    print(f"\nRunning experiment: {config.experiment}")
    if config.description:
        print(f"Description: {config.description}")
    print("-" * 60)
    result = run_experiment(config, out_dir)

    status = "✅ PASS" if result.success else "❌ FAIL"
    print(f"   Status: {status}")
    print(f"   Execution time: {result.execution_time_seconds:.2f}s")
    for key, value in result.summary.items():
        print(f"   {key}: {value}")
    for path in result.outputs:
        manifest.add_output(path)
        print(f"   Wrote {path}")

    exit_code = EXIT_OK if result.success else EXIT_FAILED
    manifest.finish(exit_code)
    manifest.write(out_dir)
    return exit_code


def list_commands():
    """List available suites and experiments"""
    print("\nVerification suites:")
    for name, suite in SUITES.items():
        print(f"  {name:16} | {(suite.__doc__ or '').strip()}")
    print("\nExperiments:")
    for name in RUNNERS:
        print(f"  {name}")


def validate_definitions(loader: ExperimentLoader) -> bool:
    """Validate all experiment definitions"""
    json_files = sorted(loader.definitions_directory.rglob("*.json"))
    print(f"\nValidating {len(json_files)} experiment files...")
    print("-" * 60)

    invalid_count = 0
    for config_file in json_files:
        try:
            config = loader.load_config(config_file)
            print(f"✅ {config_file.relative_to(loader.definitions_directory)}: {config.experiment}")
        except ConfigError as e:
            print(f"❌ {config_file.relative_to(loader.definitions_directory)}: {e}")
            invalid_count += 1

    print(f"\nValidation complete: {len(json_files) - invalid_count} valid, {invalid_count} invalid")
    return invalid_count == 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="transportlab CLI")
    parser.add_argument("--verbose", "-v", action="store_true", help="Verbose logging")

    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    cdt_parser = subparsers.add_parser("cdt", help="Cumulative distribution transform of a signal file")
    cdt_parser.add_argument("--in", dest="input", required=True, help="Signal file ('# grid1d' block)")
    cdt_parser.add_argument("--ref", default="uniform", help="Reference signal file or 'uniform'")
    cdt_parser.add_argument("--out", help="Transport map file (default: standard output)")

    verify_parser = subparsers.add_parser("verify", help="Run a verification suite")
    verify_parser.add_argument("suite", choices=sorted(SUITES), help="Suite name")
    verify_parser.add_argument("--seed", type=int, default=0, help="Master seed")
    verify_parser.add_argument("--grid-n", type=int, help="Override the suite's grid size")
    verify_parser.add_argument("--out", help=f"Output directory (default: ${OUTPUT_DIR_ENV})")

    experiment_parser = subparsers.add_parser("experiment", help="Reproduce an experiment")
    experiment_parser.add_argument("name", choices=sorted(RUNNERS), help="Experiment name")
    experiment_parser.add_argument("--config", help="Experiment definition (default: built-in)")
    experiment_parser.add_argument("--seed", type=int, help="Override the definition's seed")
    experiment_parser.add_argument("--grid-n", type=int, help="Override the definition's grid size")
    experiment_parser.add_argument("--out", help=f"Output directory (default: ${OUTPUT_DIR_ENV})")

    subparsers.add_parser("list", help="List suites and experiments")
    subparsers.add_parser("validate", help="Validate experiment definitions")
    return parser


def main(argv=None) -> int:
    """Main CLI entry point"""
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return EXIT_USAGE

    setup_logging(args.verbose)

    try:
        if args.command == "cdt":
            return cmd_cdt(args)
        elif args.command == "verify":
            return cmd_verify(args)
        elif args.command == "experiment":
            return cmd_experiment(args)
        elif args.command == "list":
            list_commands()
            return EXIT_OK
        elif args.command == "validate":
            return EXIT_OK if validate_definitions(ExperimentLoader()) else EXIT_FAILED

    except KeyboardInterrupt:
        print("\nInterrupted by user", file=sys.stderr)
        return EXIT_FAILED
    except BadReference as e:
        logger.error(f"Bad reference: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_BAD_REFERENCE
    except (SignalFormatError, ConfigError, GridError) as e:
        logger.error(f"Invalid input: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except TransportLabError as e:
        logger.error(f"Run failed: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
