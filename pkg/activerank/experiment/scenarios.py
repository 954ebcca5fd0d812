"""Ground-truth models for the configured scenarios."""
from typing import Any, Callable, Dict

from typing_extensions import Final

from activerank.env.kernel import DatasetError, fit_kernel_posterior, read_dataset
from activerank.env.models import (
    GaussianLabelPosterior,
    PiecewiseConstantPosterior,
    PosteriorModel,
    load_model,
)
from activerank.env.random_walk import (
    DEFAULT_NOISE_SCALE,
    DEFAULT_START,
    DEFAULT_STEPS,
    SCENARIO_1_STAY_PROB,
    SCENARIO_2_STAY_PROB,
    generate_random_walk_posterior,
)
from activerank.experiment.config import ConfigError, ExperimentConfig

DEFAULT_TWO_CELL_VALUES: Final = (0.8, 0.2)
DEFAULT_CONSTANT_VALUE: Final[float] = 0.5
DEFAULT_GRID_SIZE: Final[int] = 100
DEFAULT_BANDWIDTHS: Final = (0.01, 0.02, 0.05, 0.1, 0.2, 0.3)


def _random_walk(stay_prob: float) -> Callable[[Dict[str, Any], float], PosteriorModel]:
    def build(params: Dict[str, Any], beta: float) -> PosteriorModel:
        return generate_random_walk_posterior(
            steps=int(params.get("steps", DEFAULT_STEPS)),
            stay_prob=float(params.get("stay_prob", stay_prob)),
            noise_scale=float(params.get("noise_scale", DEFAULT_NOISE_SCALE)),
            seed=int(params.get("seed", 0)),
            start=float(params.get("start", DEFAULT_START)),
            smoothness=beta,
        )

    return build


def _two_cell(params: Dict[str, Any], beta: float) -> PosteriorModel:
    values = [float(v) for v in params.get("values", DEFAULT_TWO_CELL_VALUES)]
    return PiecewiseConstantPosterior.from_intervals(
        [0.0, float(params.get("split", 0.5)), 1.0], values, smoothness=beta
    )


def _constant(params: Dict[str, Any], beta: float) -> PosteriorModel:
    return PiecewiseConstantPosterior.constant(
        float(params.get("value", DEFAULT_CONSTANT_VALUE)),
        dimension=int(params.get("d", 1)),
        smoothness=beta,
    )


def _from_csv(params: Dict[str, Any], beta: float) -> PosteriorModel:
    rows = read_dataset(params["path"], rho=params.get("rho"))
    fit = fit_kernel_posterior(
        rows,
        grid_size=int(params.get("grid_size", DEFAULT_GRID_SIZE)),
        bandwidths=[float(b) for b in params.get("bandwidths", DEFAULT_BANDWIDTHS)],
        smoothness=beta,
    )
    return fit.model


def _gaussian_label(params: Dict[str, Any], beta: float) -> PosteriorModel:
    return GaussianLabelPosterior.uniform_grid(
        [float(m) for m in params["means"]],
        sigma=float(params["sigma"]),
        rho=float(params["rho"]),
        smoothness=beta,
    )


def _model_file(params: Dict[str, Any], beta: float) -> PosteriorModel:
    return load_model(params["path"])


SCENARIO_BUILDERS: Final[Dict[str, Callable[[Dict[str, Any], float], PosteriorModel]]] = {
    "rw1": _random_walk(SCENARIO_1_STAY_PROB),
    "rw2": _random_walk(SCENARIO_2_STAY_PROB),
    "two_cell": _two_cell,
    "constant": _constant,
    "from_csv": _from_csv,
    "gaussian_label": _gaussian_label,
    "model_file": _model_file,
}


def build_model(config: ExperimentConfig) -> PosteriorModel:
    """Ground-truth model of `config.scenario` with the parameters in `config.model`.

    Missing or malformed parameters are reported as :class:`ConfigError`; invalid models
    raise :class:`~activerank.env.models.InvalidModelError`.
    """
    builder = SCENARIO_BUILDERS[config.scenario]
    try:
        return builder(config.model, config.beta)
    except KeyError as e:
        raise ConfigError(f"scenario {config.scenario} needs the model parameter {e}") from e
    except DatasetError:
        raise
    except (TypeError, ValueError) as e:
        raise ConfigError(f"bad model parameters for scenario {config.scenario}: {e}") from e
