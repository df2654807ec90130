import argparse
import logging
import os
import sys
from typing import List, Optional

from pydantic import ValidationError

from src.errors import ConfigurationError
from src.harness.plotting import emit_plot
from src.harness.results_io import write_csv
from src.harness.run_experiment import run_experiment
from src.models.schemas import ExperimentSpec
from src.validation.validate_config import format_validation_errors, load_config, validate_config


logger = logging.getLogger("fascovert")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


class _ArgumentParser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad flags; route those to the configuration exit code instead."""

    def error(self, message):
        raise ConfigurationError(f"{self.prog}: {message}")


def _split(text: str) -> List[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def _float_list(text: str) -> List[float]:
    try:
        return [float(part) for part in _split(text)]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got '{text}'") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="fascovert", description="Secure and covert FAS transmission simulator")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="Monte-Carlo sweep over Pmax or epsilon")
    run.add_argument("--config", default=None, help="Flat JSON scenario file (defaults to the built-in scenario)")
    run.add_argument("--sweep", required=True, choices=["pmax", "epsilon"])
    run.add_argument("--values", required=True, type=_float_list,
                     help="Comma-separated sweep values (dBm for pmax)")
    run.add_argument("--schemes", default="proposed,fpa,rpa,eas", type=_split,
                     help="Comma-separated subset of proposed,fpa,rpa,eas")
    run.add_argument("--trials", type=int, default=100)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--out", required=True, help="CSV output path")
    run.add_argument("--plot", default=None, help="Optional SVG plot path")
    run.add_argument("--jobs", type=int, default=None,
                     help="Worker processes (falls back to FASCOVERT_JOBS, then 1)")
    run.add_argument("--log-level", default=os.environ.get("FASCOVERT_LOG_LEVEL", "WARNING").upper(),
                     choices=LOG_LEVELS)
    return parser


def _jobs(args) -> int:
    if args.jobs is not None:
        return args.jobs
    env = os.environ.get("FASCOVERT_JOBS")
    if env is None:
        return 1
    try:
        return int(env)
    except ValueError as exc:
        raise ConfigurationError(f"FASCOVERT_JOBS must be an integer, got '{env}'") from exc


def build_experiment(args) -> ExperimentSpec:
    """Turn parsed CLI arguments into a validated ExperimentSpec."""
    raw = load_config(args.config) if args.config else {}
    is_valid, config, errors = validate_config(raw)
    if not is_valid:
        raise ConfigurationError("invalid config: " + "; ".join(errors))
    try:
        return ExperimentSpec(
            config=config,
            sweep_axis=args.sweep,
            sweep_values=args.values,
            schemes=args.schemes,
            trials=args.trials,
            seed=args.seed,
            output_path=args.out,
            plot_path=args.plot,
            jobs=_jobs(args),
        )
    except ValidationError as e:
        raise ConfigurationError("invalid experiment: " + "; ".join(format_validation_errors(e))) from e


def main(argv: Optional[List[str]] = None) -> int:
    """
    Command-line entry point.

    Returns:
        int: 0 on success, 1 on a configuration error, 2 on an I/O error
    """
    try:
        args = build_parser().parse_args(argv)
    except ConfigurationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    logging.basicConfig(
        level=getattr(logging, args.log_level, logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    try:
        spec = build_experiment(args)
        table = run_experiment(spec)
        write_csv(table, spec.output_path)
        logger.info("wrote %d records to %s", len(table.records), spec.output_path)
        if spec.plot_path is not None:
            emit_plot(table, spec.plot_path)
            logger.info("wrote plot to %s", spec.plot_path)
    except (ConfigurationError, ValueError) as e:
        logger.error("%s", e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        logger.error("I/O error: %s", e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO

    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
