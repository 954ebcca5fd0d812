import pytest

from activerank.experiment.config import WORKERS_ENV_VAR


@pytest.fixture(autouse=True)
def no_workers_env(monkeypatch):
    """Tests pick their worker count explicitly."""
    monkeypatch.delenv(WORKERS_ENV_VAR, raising=False)


@pytest.fixture
def config_dict(tmp_path):
    """Raw JSON config of a small two-cell klcrank experiment writing under `tmp_path`."""
    return {
        "scenario": "two_cell",
        "algorithm": "klcrank",
        "epsilon": 0.5,
        "delta": 0.1,
        "c": 0.05,
        "replicates": 2,
        "checkpoints": [0, 100, 1000],
        "master_seed": 7,
        "sample_cap": 3000,
        "output_dir": str(tmp_path / "out"),
    }
