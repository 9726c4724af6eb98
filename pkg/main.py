#!/usr/bin/env python3
"""
Quantum Unforgeability Workbench - Main Entry Point

Runs the experiment manifests under experiments/: single game runs, parameter
sweeps and the full reproduction pass that checks every acceptance criterion
and renders the result matrix.

Usage:
    python main.py run --experiment thm4-superposition --n 6
    python main.py run --experiment thm5-qea --mu 0.5 --trials 2000
    python main.py sweep --experiment example1-double-qea --out results/example1
    python main.py reproduce-all --seed 7 --out results/full
    python main.py list
    python main.py validate --experiment trivial-overlap
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict

from qunforge.errors import InvalidParameterError, ManifestError
from qunforge.experiments import CONFIG_FILE, ExperimentRunner

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s - %(levelname)s - %(message)s",
    handlers=[
        logging.FileHandler("workbench.log"),
        logging.StreamHandler(sys.stdout),
    ],
)
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_MANIFEST = 2
EXIT_CRITERION = 3
EXIT_INTERRUPTED = 130

OVERRIDE_FLAGS = ("seed", "trials", "mu", "gamma", "n", "m", "l")
CONFIG_KEYS = ("seed", "trials", "workers", "out", "dump_states", "verbose")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Quantum unforgeability cryptanalysis workbench",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python main.py run --experiment thm4-superposition --n 6
  python main.py run --experiment thm5-qea --mu 0.5
  python main.py sweep --experiment thm5-qea --trials 2000
  python main.py reproduce-all --seed 7 --out results/full
  python main.py list
  python main.py validate --experiment aua-entangle

Exit codes: 0 success, 2 manifest, config or parameter error, 3 acceptance criterion failed.
        """,
    )
    parser.add_argument(
        "command",
        choices=["run", "sweep", "reproduce-all", "list", "validate"],
        help="Operation to perform",
    )
    parser.add_argument("--experiment", "-e", type=str, help="Experiment id or manifest path")
    parser.add_argument("--seed", type=int, help="Master seed (overrides manifest and config)")
    parser.add_argument("--trials", type=int, help="Trials per point (overrides manifest and config)")
    parser.add_argument("--out", "-o", type=str, help="Output directory for JSON/CSV artifacts")
    parser.add_argument(
        "--dump-states", action="store_true", default=None, help="Include state amplitudes in transcripts"
    )
    parser.add_argument("--mu", type=float, help="Distinguishability parameter mu")
    parser.add_argument("--gamma", type=float, help="Emulation attack amplitude gamma")
    parser.add_argument("--n", type=int, help="Message width n (dim = 2^n for quantum primitives)")
    parser.add_argument("--m", type=int, help="Tag width m")
    parser.add_argument("--l", type=int, help="Key or randomness width l")
    parser.add_argument("--config", "-c", type=str, help="JSON file with defaults for these flags")
    parser.add_argument("--workers", type=int, help="Worker threads per experiment point")
    parser.add_argument("--verbose", action="store_true", default=None, help="Enable verbose logging")
    parser.add_argument("--base-path", type=str, help="Repository root holding experiments/")
    return parser


def resolve_settings(args: argparse.Namespace, runner: ExperimentRunner) -> Dict[str, Any]:
    """Config file values (experiments/workbench_config.json by default), then explicit flags on top."""
    settings: Dict[str, Any] = {}
    config_path = Path(args.config) if args.config else runner.experiments_path / CONFIG_FILE
    if args.config or config_path.exists():
        config = runner.load_config(config_path)
        settings.update({k: config[k] for k in CONFIG_KEYS if k in config})
    for key in CONFIG_KEYS + OVERRIDE_FLAGS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    return settings


def print_experiments(runner: ExperimentRunner):
    experiments = runner.list_experiments()
    print("\nAvailable Experiments:")
    print("=" * 50)
    for experiment, info in experiments.items():
        print(f"ID: {experiment}")
        print(f"Procedure: {info['procedure']}")
        if info["criterion"] is not None:
            print(f"Criterion: {info['criterion']}")
        print(f"Description: {info['description']}")
        print("-" * 30)


def main():
    """Main entry point for the workbench."""
    parser = build_parser()
    args = parser.parse_args()

    try:
        runner = ExperimentRunner(args.base_path)
        settings = resolve_settings(args, runner)
        if settings.get("verbose"):
            logging.getLogger().setLevel(logging.DEBUG)
        runner.workers = max(1, int(settings.get("workers", 1)))
        runner.dump_states = bool(settings.get("dump_states", False))
        if settings.get("out"):
            runner.results_path = Path(settings["out"])

        if args.command == "list":
            print_experiments(runner)
            sys.exit(EXIT_OK)

        if args.command == "reproduce-all":
            summary = runner.reproduce_all(settings.get("seed"), settings.get("trials"))
            print(runner.generate_summary_report(summary))
            sys.exit(EXIT_OK if summary.passed else EXIT_CRITERION)

        if not args.experiment:
            parser.print_help()
            print(f"\nError: '{args.command}' needs --experiment")
            sys.exit(EXIT_MANIFEST)

        if args.command == "validate":
            is_valid = runner.validate_manifest(args.experiment)
            print(f"Experiment manifest '{args.experiment}': {'VALID' if is_valid else 'INVALID'}")
            sys.exit(EXIT_OK if is_valid else EXIT_MANIFEST)

        manifest = runner.apply_overrides(
            runner.load_manifest(args.experiment), {k: settings.get(k) for k in OVERRIDE_FLAGS}
        )
        if args.command == "run":
            report = runner.run(manifest)
            written = runner.write_report(report, manifest, with_csv=False)
        else:
            report = runner.sweep(manifest)
            written = runner.write_report(report, manifest)
        for path in written:
            print(f"Results saved to: {path}")
        print(json.dumps({"experiment": report.experiment, "passed": report.passed}, indent=2))
        sys.exit(EXIT_OK)

    except ManifestError as e:
        logger.error(f"Manifest error: {e}")
        sys.exit(EXIT_MANIFEST)
    except json.JSONDecodeError as e:
        logger.error(f"Invalid JSON: {e}")
        sys.exit(EXIT_MANIFEST)
    except InvalidParameterError as e:
        logger.error(f"Invalid parameter: {e}")
        sys.exit(EXIT_MANIFEST)
    except KeyboardInterrupt:
        logger.info("Operation cancelled by user")
        sys.exit(EXIT_INTERRUPTED)
    except Exception as e:
        logger.error(f"Unexpected error: {e}")
        sys.exit(EXIT_FAILURE)


if __name__ == "__main__":
    main()
