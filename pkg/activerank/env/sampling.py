"""Label sampling.

Ranking algorithms never see a :class:`~activerank.env.models.PosteriorModel`; they get a
:class:`LabelSampler`, which only answers label queries. The experiment runner keeps the
model itself for the oracle-side regret computation.
"""
import abc

import numpy as np

from activerank.env.models import (
    GaussianLabelPosterior,
    PointLike,
    PosteriorModel,
    as_points,
)


class KindMismatchError(TypeError):
    """Raised when continuous labels are requested from a model without them."""

    def __init__(self, kind: str):
        self.kind = kind

    def __str__(self) -> str:
        return f"Continuous labels need a continuous_label_gaussian model, got `{self.kind}`"


def sample_label(model: PosteriorModel, x: PointLike, rng: np.random.Generator) -> int:
    """Draw Y ~ Bernoulli(eta(x))."""
    return int(rng.random() < model.eta_at(x))


def sample_continuous_label(model: PosteriorModel, x: PointLike, rng: np.random.Generator) -> float:
    """Draw Y ~ Normal(m(x), sigma^2) from a continuous-label model."""
    if not isinstance(model, GaussianLabelPosterior):
        raise KindMismatchError(model.kind)
    return float(rng.normal(model.mean(x)[0], model.sigma))


class LabelSampler(abc.ABC):
    """Answers label queries at points of [0, 1]^d."""

    binary: bool
    dimension: int

    @abc.abstractmethod
    def draw(self, x: PointLike, rng: np.random.Generator) -> float:
        """Draw one label at `x`."""

    @abc.abstractmethod
    def draw_many(self, points: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """Draw one label at each row of `points`, in row order."""

    def draw_uniform(self, rng: np.random.Generator) -> float:
        """Draw a point uniformly from the unit cube, then its label."""
        return self.draw(rng.random(self.dimension), rng)


class BernoulliLabelSampler(LabelSampler):
    binary = True

    def __init__(self, model: PosteriorModel):
        self._model = model
        self.dimension = model.dimension

    def draw(self, x: PointLike, rng: np.random.Generator) -> float:
        return float(sample_label(self._model, x, rng))

    def draw_many(self, points: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        eta = self._model.eta(as_points(points, self.dimension))
        return (rng.random(eta.size) < eta).astype(float)


class ContinuousLabelSampler(LabelSampler):
    binary = False

    def __init__(self, model: PosteriorModel):
        if not isinstance(model, GaussianLabelPosterior):
            raise KindMismatchError(model.kind)
        self._model = model
        self.dimension = model.dimension

    def draw(self, x: PointLike, rng: np.random.Generator) -> float:
        return sample_continuous_label(self._model, x, rng)

    def draw_many(self, points: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        means = self._model.mean(as_points(points, self.dimension))
        return rng.normal(means, self._model.sigma)
