"""Experiment configuration: the JSON schema, its validation and the derived seeds."""
from dataclasses import asdict, dataclass, field, replace
import hashlib
import itertools
import json
import os
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from typing_extensions import Final

from activerank.ranking.runner import ALGORITHMS, DEFAULT_CHECKPOINTS, DEFAULT_SAMPLE_CAP

SCENARIOS: Final = (
    "rw1",
    "rw2",
    "two_cell",
    "constant",
    "from_csv",
    "gaussian_label",
    "model_file",
)

# Scenarios whose labels are continuous, as required by kltcrank.
CONTINUOUS_SCENARIOS: Final = ("gaussian_label", "model_file")

WORKERS_ENV_VAR: Final[str] = "ARL_WORKERS"

_SEED_LIMIT: Final[int] = 2 ** 64


class ConfigError(Exception):
    """Raised when an experiment configuration is invalid; lists every problem found."""

    def __init__(self, *problems: str):
        super().__init__(*problems)
        self.problems = problems

    def __str__(self):
        msg = "Invalid experiment config"
        if self.problems:
            msg += ": " + "; ".join(self.problems)
        return msg


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str
    algorithm: str
    epsilon: float
    delta: float
    model: Dict[str, Any] = field(default_factory=dict)
    """Scenario parameters, e.g. `steps`, `stay_prob`, `noise_scale` for random walks."""

    beta: float = 1.0
    c: float = 1.0
    K: Optional[int] = None
    rho: Optional[float] = None
    replicates: int = 1
    checkpoints: Tuple[int, ...] = DEFAULT_CHECKPOINTS
    master_seed: int = 0
    sample_cap: int = DEFAULT_SAMPLE_CAP
    output_dir: str = "results"

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExperimentConfig":
        """Build and validate a config; all problems are reported in one :class:`ConfigError`."""
        if not isinstance(data, dict):
            raise ConfigError("the config must be a JSON object")
        known = {f for f in cls.__dataclass_fields__}
        problems = [f"unknown key `{key}`" for key in data if key not in known]
        problems.extend(
            f"missing key `{key}`"
            for key in ("scenario", "algorithm", "epsilon", "delta")
            if key not in data
        )
        if problems:
            raise ConfigError(*problems)

        values = dict(data)
        try:
            values["checkpoints"] = tuple(int(b) for b in values.get("checkpoints", ()))
        except (TypeError, ValueError):
            raise ConfigError("`checkpoints` must be a list of integers")
        if "checkpoints" not in data:
            values["checkpoints"] = DEFAULT_CHECKPOINTS
        values["model"] = dict(values.get("model") or {})
        if values.get("rho") is None and values["model"].get("rho") is not None:
            values["rho"] = values["model"]["rho"]

        config = cls(**values)
        problems = config.problems()
        if problems:
            raise ConfigError(*problems)
        return replace(
            config,
            epsilon=float(config.epsilon),
            delta=float(config.delta),
            beta=float(config.beta),
            c=float(config.c),
            rho=None if config.rho is None else float(config.rho),
        )

    def problems(self) -> List[str]:
        found = []
        if self.scenario not in SCENARIOS:
            found.append(f"scenario must be one of {SCENARIOS}, got {self.scenario!r}")
        if self.algorithm not in ALGORITHMS:
            found.append(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        for name in ("epsilon", "delta"):
            value = getattr(self, name)
            if not _is_number(value) or not 0.0 < value < 1.0:
                found.append(f"`{name}` must lie in (0, 1), got {value!r}")
        for name in ("beta", "c"):
            value = getattr(self, name)
            if not _is_number(value) or not value > 0:
                found.append(f"`{name}` must be positive, got {value!r}")
        if not _is_int(self.replicates) or self.replicates < 1:
            found.append(f"`replicates` must be a positive integer, got {self.replicates!r}")
        if not _is_int(self.sample_cap) or self.sample_cap < 1:
            found.append(f"`sample_cap` must be a positive integer, got {self.sample_cap!r}")
        if any(b < 0 for b in self.checkpoints):
            found.append("checkpoint budgets must be non-negative")
        if not _is_int(self.master_seed) or not 0 <= self.master_seed < _SEED_LIMIT:
            found.append(
                f"`master_seed` must be an unsigned 64-bit integer, got {self.master_seed!r}"
            )
        if self.algorithm == "fixed_grid":
            if not _is_int(self.K) or self.K < 2:
                found.append(f"fixed_grid needs an integer `K` >= 2, got {self.K!r}")
        if self.algorithm == "kltcrank":
            if not _is_number(self.rho):
                found.append("kltcrank needs a numeric threshold `rho`")
            if self.scenario not in CONTINUOUS_SCENARIOS:
                found.append(f"kltcrank needs continuous labels, scenario is {self.scenario!r}")
            model_rho = self.model.get("rho")
            mismatch = model_rho is not None and model_rho != self.rho
            if self.scenario == "gaussian_label" and mismatch:
                found.append(f"`rho` {self.rho!r} differs from the model threshold {model_rho!r}")
        if not isinstance(self.output_dir, str) or not self.output_dir:
            found.append("`output_dir` must be a non-empty path")
        return found

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["checkpoints"] = list(self.checkpoints)
        return data

    @property
    def config_hash(self) -> str:
        """First 16 hex digits of the SHA-256 of the canonical JSON, without `output_dir`."""
        data = self.to_dict()
        del data["output_dir"]
        canonical = json.dumps(data, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]

    def replicate_seed(self, replicate: int) -> int:
        return replicate_seed(self.master_seed, replicate)

    def with_overrides(self, **overrides) -> "ExperimentConfig":
        """Copy with some fields replaced, validated like :meth:`from_dict`."""
        data = self.to_dict()
        data.update(overrides)
        return ExperimentConfig.from_dict(data)


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) and np.isfinite(value)


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def replicate_seed(master_seed: int, replicate: int) -> int:
    """Seed of replicate `replicate`, split off `master_seed` by its spawn key."""
    sequence = np.random.SeedSequence(master_seed, spawn_key=(replicate,))
    return int(sequence.generate_state(1, np.uint64)[0])


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    """Read an experiment config JSON file.

    Malformed JSON is reported as :class:`ConfigError`; a missing file raises `OSError`.
    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path} is not valid JSON: {e}") from e
    return ExperimentConfig.from_dict(data)


def resolve_workers(workers: Optional[int] = None) -> int:
    """Worker count: the explicit argument, then the `ARL_WORKERS` env var, then 1."""
    if workers is None:
        raw = os.getenv(WORKERS_ENV_VAR)
        if raw is None:
            return 1
        try:
            workers = int(raw)
        except ValueError:
            raise ConfigError(f"{WORKERS_ENV_VAR} must be an integer, got {raw!r}")
    if workers < 1:
        raise ConfigError(f"the worker count must be positive, got {workers}")
    return workers


def sweep_configs(
    base: ExperimentConfig,
    epsilons: Sequence[float] = (),
    algorithms: Sequence[str] = (),
    grid_sizes: Sequence[int] = (),
) -> Iterable[ExperimentConfig]:
    """Configs for the cartesian product of the given values, one output dir per combination.

    Empty sequences keep the base value; `K` only varies for the fixed_grid baseline.
    """
    seen = set()
    for epsilon, algorithm, k in itertools.product(
        epsilons or (base.epsilon,), algorithms or (base.algorithm,), grid_sizes or (base.K,)
    ):
        if algorithm != "fixed_grid":
            k = None
        name = f"{algorithm}_eps{epsilon:g}" + (f"_K{k}" if algorithm == "fixed_grid" else "")
        if name in seen:
            continue
        seen.add(name)
        yield replace(base, epsilon=epsilon, algorithm=algorithm, K=k).with_overrides(
            output_dir=str(Path(base.output_dir) / name)
        )
