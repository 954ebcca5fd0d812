"""Posterior models fitted from a one-feature labelled dataset by kernel regression."""
import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.model_selection import GridSearchCV, KFold
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y
from typing_extensions import Final

from activerank.env.models import TABULATED, PiecewiseConstantPosterior

MIN_ROWS: Final[int] = 50
CV_FOLDS: Final[int] = 5
CLIP_RANGE: Final[Tuple[float, float]] = (0.01, 0.99)

_PREDICT_BATCH: Final[int] = 512


class DatasetError(ValueError):
    """The labelled dataset cannot be used to fit a posterior."""


class NadarayaWatsonRegressor(BaseEstimator, RegressorMixin):
    """Nadaraya-Watson regression with a Gaussian kernel."""

    def __init__(self, bandwidth: float = 0.1):
        self.bandwidth = bandwidth

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        self.X_ = X
        self.y_ = y.astype(float)
        self.fallback_ = float(self.y_.mean())
        return self

    def predict(self, X):
        check_is_fitted(self, "X_")
        X = check_array(X)
        out = np.empty(X.shape[0])
        for start in range(0, X.shape[0], _PREDICT_BATCH):
            chunk = X[start : start + _PREDICT_BATCH]
            sq_dist = ((chunk[:, None, :] - self.X_[None, :, :]) ** 2).sum(axis=2)
            weights = np.exp(-0.5 * sq_dist / self.bandwidth ** 2)
            total = weights.sum(axis=1)
            with np.errstate(invalid="ignore", divide="ignore"):
                estimate = weights @ self.y_ / total
            out[start : start + _PREDICT_BATCH] = np.where(total > 0, estimate, self.fallback_)
        return out


@dataclass(frozen=True)
class KernelFit:
    model: PiecewiseConstantPosterior
    bandwidth: float
    cv_error: float
    cv_errors: Tuple[float, ...]
    bandwidths: Tuple[float, ...]
    feature_range: Tuple[float, float]

    def report(self) -> dict:
        return {
            "bandwidth": self.bandwidth,
            "cv_error": self.cv_error,
            "candidates": [
                {"bandwidth": b, "cv_error": e} for b, e in zip(self.bandwidths, self.cv_errors)
            ],
            "feature_min": self.feature_range[0],
            "feature_max": self.feature_range[1],
            "cells": len(self.model),
        }


def fit_kernel_posterior(
    rows: Iterable[Tuple[float, float]],
    grid_size: int,
    bandwidths: Sequence[float],
    smoothness: float = 1.0,
) -> KernelFit:
    """Fit eta by kernel regression and tabulate it on `grid_size` equal cells.

    Features are min-max rescaled to [0, 1]; the bandwidth is picked by 5-fold
    cross-validated squared error; tabulated values are clipped to [0.01, 0.99].
    """
    data = np.asarray(list(rows), dtype=float)
    if data.size == 0:
        raise DatasetError("the dataset is empty")
    if data.ndim != 2 or data.shape[1] != 2:
        raise DatasetError("rows must be (feature, label) pairs")
    if data.shape[0] < MIN_ROWS:
        raise DatasetError(f"at least {MIN_ROWS} rows are needed, got {data.shape[0]}")
    if grid_size < 1:
        raise DatasetError(f"grid_size must be positive, got {grid_size}")
    if not bandwidths or any(b <= 0 for b in bandwidths):
        raise DatasetError("bandwidths must be a non-empty list of positive numbers")

    features, labels = data[:, 0], data[:, 1]
    f_min, f_max = float(features.min()), float(features.max())
    if f_max == f_min:
        raise DatasetError("all features are identical")
    scaled = ((features - f_min) / (f_max - f_min)).reshape(-1, 1)

    search = GridSearchCV(
        NadarayaWatsonRegressor(),
        {"bandwidth": list(bandwidths)},
        cv=KFold(n_splits=CV_FOLDS, shuffle=True, random_state=0),
        scoring="neg_mean_squared_error",
    )
    search.fit(scaled, labels)
    cv_errors = tuple(float(-s) for s in search.cv_results_["mean_test_score"])

    centers = ((np.arange(grid_size) + 0.5) / grid_size).reshape(-1, 1)
    values = np.clip(search.best_estimator_.predict(centers), *CLIP_RANGE)
    model = PiecewiseConstantPosterior.uniform_grid(values, smoothness=smoothness, kind=TABULATED)
    return KernelFit(
        model=model,
        bandwidth=float(search.best_params_["bandwidth"]),
        cv_error=float(-search.best_score_),
        cv_errors=cv_errors,
        bandwidths=tuple(float(b) for b in bandwidths),
        feature_range=(f_min, f_max),
    )


def read_dataset(path: Union[str, Path], rho: Optional[float] = None) -> List[Tuple[float, int]]:
    """Read a `feature,label` CSV, or a `feature,value` CSV thresholded at `rho`."""
    rows: List[Tuple[float, int]] = []
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        columns = set(reader.fieldnames or ())
        if "feature" not in columns or not columns & {"label", "value"}:
            raise DatasetError(f"{path}: expected a header with `feature,label` or `feature,value`")
        continuous = "label" not in columns
        if continuous and rho is None:
            raise DatasetError(f"{path}: continuous `value` column needs a threshold rho")
        for line, record in enumerate(reader, start=2):
            try:
                feature = float(record["feature"])
                if continuous:
                    label = int(float(record["value"]) >= rho)
                else:
                    raw = float(record["label"])
                    if raw not in (0.0, 1.0):
                        raise ValueError(raw)
                    label = int(raw)
            except (TypeError, ValueError) as e:
                raise DatasetError(f"{path}:{line}: malformed row {record!r}") from e
            if not np.isfinite(feature):
                raise DatasetError(f"{path}:{line}: feature is not finite")
            rows.append((feature, label))
    return rows
