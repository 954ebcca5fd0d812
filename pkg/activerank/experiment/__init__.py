"""Monte Carlo experiments: configs, scenarios, the replicate harness and its artifacts."""
from activerank.experiment.config import (
    ConfigError,
    ExperimentConfig,
    load_config,
    replicate_seed,
    resolve_workers,
    sweep_configs,
)
from activerank.experiment.harness import Experiment, ReplicateJob, run_experiment, run_replicate
from activerank.experiment.replicate_state import ReplicateState
from activerank.experiment.scenarios import build_model

__all__ = (
    "ConfigError",
    "Experiment",
    "ExperimentConfig",
    "ReplicateJob",
    "ReplicateState",
    "build_model",
    "load_config",
    "replicate_seed",
    "resolve_workers",
    "run_experiment",
    "run_replicate",
    "sweep_configs",
)
