"""Command line interface: `activerank run|sweep|oracle|ingest`.

Exit codes: 0 on success (a hit of the sample cap is not an error), 2 for invalid configs,
models, parameters or datasets, 3 for I/O errors and 1 for anything else.
"""
import argparse
import asyncio
import json
import logging
from pathlib import Path
import sys
from typing import List, Optional, Sequence

from activerank import __version__
from activerank.env.kernel import DatasetError, fit_kernel_posterior, read_dataset
from activerank.env.models import DomainError, InvalidModelError, load_model
from activerank.env.oracle import (
    DKW_VARIANT,
    DegeneratePointError,
    KL_VARIANT,
    sampling_time_scale,
    total_complexity,
)
from activerank.env.sampling import KindMismatchError
from activerank.experiment import artifacts
from activerank.experiment.config import ConfigError, load_config, sweep_configs
from activerank.experiment.harness import run_experiment
from activerank.experiment.scenarios import DEFAULT_BANDWIDTHS, DEFAULT_GRID_SIZE
from activerank.log import enable_default_logger, log_summary
from activerank.ranking.base import InvalidParametersError
from activerank.ranking.runner import ALGORITHMS
from activerank.roc import RocUndefinedError

logger = logging.getLogger("activerank.cli")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INVALID = 2
EXIT_IO = 3

INVALID_INPUT_ERRORS = (
    ConfigError,
    InvalidModelError,
    DatasetError,
    DomainError,
    KindMismatchError,
    InvalidParametersError,
    RocUndefinedError,
    DegeneratePointError,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="activerank", description="Active bipartite ranking experiments and oracles."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-file", default=None, help="Also log at DEBUG level to this file")
    parser.add_argument(
        "--debug-ranking",
        action="store_true",
        help="Log every elimination and refinement step of the ranking algorithms",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    run = subparsers.add_parser("run", help="Run the replicates of one experiment config")
    run.add_argument("config", help="Experiment config JSON file")
    _add_run_overrides(run)
    run.set_defaults(handler=_run)

    sweep = subparsers.add_parser(
        "sweep", help="Run the cartesian product of epsilons, algorithms and grid sizes"
    )
    sweep.add_argument("config", help="Base experiment config JSON file")
    sweep.add_argument("--epsilons", type=float, nargs="+", default=[])
    sweep.add_argument("--algorithms", choices=ALGORITHMS, nargs="+", default=[])
    sweep.add_argument("--grid-sizes", type=int, nargs="+", default=[])
    _add_run_overrides(sweep)
    sweep.set_defaults(handler=_sweep)

    oracle = subparsers.add_parser(
        "oracle", help="Write the gap profile and optimal ROC of a model"
    )
    oracle.add_argument("model", help="Posterior model JSON file")
    oracle.add_argument("--epsilon", type=float, required=True)
    oracle.add_argument("--delta", type=float, default=None)
    oracle.add_argument("--variant", choices=(KL_VARIANT, DKW_VARIANT), default=KL_VARIANT)
    oracle.add_argument("--points", type=int, default=1000, help="Size of the report grid")
    oracle.add_argument("--output-dir", default=".")
    oracle.set_defaults(handler=_oracle)

    ingest = subparsers.add_parser("ingest", help="Fit a tabulated posterior to a CSV dataset")
    ingest.add_argument("csv", help="`feature,label` or `feature,value` CSV file")
    ingest.add_argument("--grid-size", type=int, default=DEFAULT_GRID_SIZE)
    ingest.add_argument("--bandwidths", type=float, nargs="+", default=list(DEFAULT_BANDWIDTHS))
    ingest.add_argument("--rho", type=float, default=None, help="Threshold for a value column")
    ingest.add_argument("--beta", type=float, default=1.0, help="Smoothness stored in the model")
    ingest.add_argument("--output", required=True, help="Model JSON file to write")
    ingest.add_argument("--report", default=None, help="Fit report JSON file to write")
    ingest.set_defaults(handler=_ingest)

    return parser


def _add_run_overrides(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None, help="Override `master_seed`")
    parser.add_argument(
        "--workers", type=int, default=None, help="Worker processes (default: $ARL_WORKERS or 1)"
    )
    parser.add_argument("--output-dir", default=None, help="Override `output_dir`")


def _load_run_config(args: argparse.Namespace):
    config = load_config(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.output_dir is not None:
        overrides["output_dir"] = args.output_dir
    return config.with_overrides(**overrides) if overrides else config


def _run(args: argparse.Namespace) -> int:
    config = _load_run_config(args)
    asyncio.run(run_experiment(config, workers=args.workers, event_consumer=log_summary()))
    return EXIT_OK


def _sweep(args: argparse.Namespace) -> int:
    base = _load_run_config(args)
    configs = list(sweep_configs(base, args.epsilons, args.algorithms, args.grid_sizes))
    logger.info("Sweeping %d configs", len(configs))
    for config in configs:
        asyncio.run(run_experiment(config, workers=args.workers, event_consumer=log_summary()))
    return EXIT_OK


def _oracle(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    gap_path = artifacts.write_gap_profile(
        out / artifacts.GAP_PROFILE_FILE, model, args.epsilon, args.points, args.variant
    )
    roc_path = artifacts.write_roc_star(out / artifacts.ROC_STAR_FILE, model)
    logger.info("Wrote %s and %s", gap_path, roc_path)

    print(f"total_complexity: {total_complexity(model, args.epsilon, args.variant)!r}")
    if args.delta is not None:
        scale = sampling_time_scale(model, args.epsilon, args.delta, args.variant)
        print(f"sampling_time_scale: {scale!r}")
    return EXIT_OK


def _ingest(args: argparse.Namespace) -> int:
    rows = read_dataset(args.csv, rho=args.rho)
    fit = fit_kernel_posterior(rows, args.grid_size, args.bandwidths, smoothness=args.beta)
    fit.model.save(args.output)
    report = fit.report()
    if args.report:
        Path(args.report).write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    logger.info(
        "Fitted %d cells with bandwidth %s (cv error %.6g)",
        report["cells"],
        fit.bandwidth,
        fit.cv_error,
    )
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    enable_default_logger(log_file=args.log_file, debug_ranking=args.debug_ranking)
    try:
        return args.handler(args)
    except INVALID_INPUT_ERRORS as e:
        logger.error("%s", e)
        return EXIT_INVALID
    except OSError as e:
        logger.error("I/O error: %s", e)
        return EXIT_IO
    except KeyboardInterrupt:
        logger.warning("Interrupted")
        return EXIT_FAILURE
    except Exception:
        logger.exception("Unexpected error")
        return EXIT_FAILURE


def run_cli(argv: Optional[List[str]] = None) -> None:
    sys.exit(main(argv))
