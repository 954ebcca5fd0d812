import json

import pytest

from activerank.experiment.config import (
    WORKERS_ENV_VAR,
    ConfigError,
    ExperimentConfig,
    load_config,
    replicate_seed,
    resolve_workers,
    sweep_configs,
)
from activerank.ranking.runner import DEFAULT_CHECKPOINTS, DEFAULT_SAMPLE_CAP
from tests.factories.config import ExperimentConfigFactory


def test_defaults():
    config = ExperimentConfig.from_dict(
        {"scenario": "rw1", "algorithm": "klcrank", "epsilon": 0.1, "delta": 0.1}
    )
    assert config.checkpoints == DEFAULT_CHECKPOINTS
    assert config.sample_cap == DEFAULT_SAMPLE_CAP
    assert config.replicates == 1
    assert config.beta == 1.0 and config.c == 1.0
    assert config.output_dir == "results"


def test_all_problems_are_reported():
    with pytest.raises(ConfigError) as e:
        ExperimentConfig.from_dict({"scenario": "rw1", "colour": "blue"})
    problems = e.value.problems
    assert "unknown key `colour`" in problems
    assert "missing key `algorithm`" in problems
    assert "missing key `epsilon`" in problems
    assert "missing key `delta`" in problems
    assert str(e.value).startswith("Invalid experiment config: ")


@pytest.mark.parametrize(
    "overrides, fragment",
    [
        ({"scenario": "rw3"}, "scenario"),
        ({"algorithm": "ucb"}, "algorithm"),
        ({"epsilon": 1.0}, "`epsilon`"),
        ({"delta": 0}, "`delta`"),
        ({"epsilon": True}, "`epsilon`"),
        ({"beta": -1}, "`beta`"),
        ({"c": 0}, "`c`"),
        ({"replicates": 0}, "`replicates`"),
        ({"replicates": 2.5}, "`replicates`"),
        ({"sample_cap": 0}, "`sample_cap`"),
        ({"checkpoints": [-1]}, "checkpoint"),
        ({"checkpoints": ["x"]}, "checkpoints"),
        ({"master_seed": -1}, "`master_seed`"),
        ({"master_seed": 2 ** 64}, "`master_seed`"),
        ({"algorithm": "fixed_grid"}, "`K`"),
        ({"algorithm": "fixed_grid", "K": 1}, "`K`"),
        ({"algorithm": "kltcrank"}, "kltcrank"),
        ({"output_dir": ""}, "`output_dir`"),
    ],
)
def test_invalid_values(config_dict, overrides, fragment):
    with pytest.raises(ConfigError) as e:
        ExperimentConfig.from_dict({**config_dict, **overrides})
    assert fragment in str(e.value)


def test_kltcrank_needs_continuous_labels(config_dict):
    data = {**config_dict, "algorithm": "kltcrank", "rho": 0.0}
    with pytest.raises(ConfigError, match="continuous labels"):
        ExperimentConfig.from_dict(data)
    data["scenario"] = "gaussian_label"
    data["model"] = {"means": [1.0, -1.0], "sigma": 1.0, "rho": 0.0}
    assert ExperimentConfig.from_dict(data).rho == 0.0


def test_kltcrank_threshold_must_match_the_model(config_dict):
    data = {
        **config_dict,
        "algorithm": "kltcrank",
        "scenario": "gaussian_label",
        "rho": 0.5,
        "model": {"means": [1.0, -1.0], "sigma": 1.0, "rho": 0.0},
    }
    with pytest.raises(ConfigError, match="threshold"):
        ExperimentConfig.from_dict(data)


def test_rho_defaults_to_the_model_threshold(config_dict):
    data = {
        **config_dict,
        "algorithm": "kltcrank",
        "scenario": "gaussian_label",
        "model": {"means": [1.0, -1.0], "sigma": 1.0, "rho": 0.25},
    }
    assert ExperimentConfig.from_dict(data).rho == 0.25


def test_config_hash():
    config = ExperimentConfigFactory()
    assert len(config.config_hash) == 16
    assert config.with_overrides(output_dir="elsewhere").config_hash == config.config_hash
    assert config.with_overrides(epsilon=0.4).config_hash != config.config_hash
    # integer and float spellings of the same value hash alike
    assert config.with_overrides(c=1).config_hash == config.with_overrides(c=1.0).config_hash


def test_to_dict_round_trip():
    config = ExperimentConfigFactory(algorithm="fixed_grid", K=8)
    assert ExperimentConfig.from_dict(json.loads(json.dumps(config.to_dict()))) == config


def test_replicate_seeds():
    seeds = [replicate_seed(7, r) for r in range(100)]
    assert len(set(seeds)) == 100
    assert seeds == [replicate_seed(7, r) for r in range(100)]
    assert replicate_seed(8, 0) != seeds[0]
    assert all(0 <= s < 2 ** 64 for s in seeds)
    assert ExperimentConfigFactory(master_seed=7).replicate_seed(3) == seeds[3]


def test_load_config(tmp_path, config_dict):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(config_dict))
    assert load_config(path).output_dir == config_dict["output_dir"]
    path.write_text("{")
    with pytest.raises(ConfigError):
        load_config(path)
    with pytest.raises(OSError):
        load_config(tmp_path / "missing.json")


def test_resolve_workers(monkeypatch):
    assert resolve_workers() == 1
    monkeypatch.setenv(WORKERS_ENV_VAR, "3")
    assert resolve_workers() == 3
    assert resolve_workers(2) == 2
    monkeypatch.setenv(WORKERS_ENV_VAR, "many")
    with pytest.raises(ConfigError):
        resolve_workers()
    with pytest.raises(ConfigError):
        resolve_workers(0)


def test_sweep_configs():
    base = ExperimentConfigFactory(output_dir="sweep")
    configs = list(
        sweep_configs(base, [0.5, 0.25], ["klcrank", "fixed_grid"], [4, 8])
    )
    names = sorted(c.output_dir for c in configs)
    assert names == sorted(
        [
            "sweep/klcrank_eps0.5",
            "sweep/klcrank_eps0.25",
            "sweep/fixed_grid_eps0.5_K4",
            "sweep/fixed_grid_eps0.5_K8",
            "sweep/fixed_grid_eps0.25_K4",
            "sweep/fixed_grid_eps0.25_K8",
        ]
    )
    assert all(c.K is None for c in configs if c.algorithm == "klcrank")
    assert len({c.config_hash for c in configs}) == len(configs)


def test_sweep_keeps_base_values():
    base = ExperimentConfigFactory(output_dir="sweep")
    (config,) = sweep_configs(base)
    assert config.epsilon == base.epsilon and config.algorithm == base.algorithm
    assert config.output_dir == "sweep/klcrank_eps0.5"
