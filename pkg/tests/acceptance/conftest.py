"""Monte Carlo acceptance checks; they only run when `ARL_ACCEPTANCE` is set.

`ARL_WORKERS` sets the worker count of the experiments run here.
"""
import asyncio
import os
from typing import Any, Dict, List

import pytest

from activerank.experiment import ExperimentConfig, run_experiment
from activerank.record import RunRecord

ACCEPTANCE_ENV_VAR = "ARL_ACCEPTANCE"

# read before the root conftest clears it for the unit tests
WORKERS = int(os.getenv("ARL_WORKERS", "1"))


@pytest.fixture(autouse=True)
def acceptance_enabled():
    if not os.getenv(ACCEPTANCE_ENV_VAR):
        pytest.skip(f"set {ACCEPTANCE_ENV_VAR}=1 to run the Monte Carlo acceptance checks")


@pytest.fixture
def run_config(tmp_path):
    """Run an experiment given as a raw config dict; returns its records."""

    def run(data: Dict[str, Any], name: str = "run") -> List[RunRecord]:
        config = ExperimentConfig.from_dict({"output_dir": str(tmp_path / name), **data})
        return asyncio.run(run_experiment(config, workers=WORKERS))

    return run
