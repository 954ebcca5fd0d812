"""Posterior environments: ground-truth models, label sampling and problem oracles."""
from activerank.env.kernel import (
    DatasetError,
    KernelFit,
    NadarayaWatsonRegressor,
    fit_kernel_posterior,
    read_dataset,
)
from activerank.env.models import (
    AnalyticPosterior,
    DomainError,
    GaussianLabelPosterior,
    InvalidModelError,
    PiecewiseConstantPosterior,
    PosteriorModel,
    load_model,
    model_from_dict,
)
from activerank.env.oracle import (
    DegeneratePointError,
    GapProfile,
    gap,
    positive_mass,
    sampling_time_scale,
    total_complexity,
)
from activerank.env.random_walk import generate_random_walk_posterior
from activerank.env.sampling import (
    BernoulliLabelSampler,
    ContinuousLabelSampler,
    KindMismatchError,
    LabelSampler,
    sample_continuous_label,
    sample_label,
)

__all__ = (
    "AnalyticPosterior",
    "BernoulliLabelSampler",
    "ContinuousLabelSampler",
    "DatasetError",
    "DegeneratePointError",
    "DomainError",
    "GapProfile",
    "GaussianLabelPosterior",
    "InvalidModelError",
    "KernelFit",
    "KindMismatchError",
    "LabelSampler",
    "NadarayaWatsonRegressor",
    "PiecewiseConstantPosterior",
    "PosteriorModel",
    "fit_kernel_posterior",
    "gap",
    "generate_random_walk_posterior",
    "load_model",
    "model_from_dict",
    "positive_mass",
    "read_dataset",
    "sample_continuous_label",
    "sample_label",
    "sampling_time_scale",
    "total_complexity",
)
