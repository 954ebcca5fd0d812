"""Ground-truth posterior models on the unit cube.

A model gives the regression function eta(x) = P(Y = 1 | X = x). Every model can be
expressed as (or tabulated into) a :class:`PiecewiseConstantPosterior`, which is what
the exact oracles in :mod:`activerank.env.oracle` and :mod:`activerank.roc` work on.
"""
import abc
import json
import math
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import integrate, stats
from typing_extensions import Final

PIECEWISE_CONSTANT: Final[str] = "piecewise_constant"
TABULATED: Final[str] = "tabulated"
ANALYTIC_CALLABLE: Final[str] = "analytic_callable"
CONTINUOUS_LABEL_GAUSSIAN: Final[str] = "continuous_label_gaussian"

MODEL_KINDS: Final = (PIECEWISE_CONSTANT, TABULATED, ANALYTIC_CALLABLE, CONTINUOUS_LABEL_GAUSSIAN)

WIDTH_TOLERANCE: Final[float] = 1e-12
QUADRATURE_TOLERANCE: Final[float] = 1e-8

# Cells of the uniform grid used to tabulate analytic models, by dimension.
TABULATION_CELLS_PER_AXIS: Final[Dict[int, int]] = {1: 1000, 2: 100, 3: 20}

# Maximum number of (query box, model cell) overlaps computed in one numpy batch.
_OVERLAP_BATCH: Final[int] = 1 << 20

PointLike = Union[float, Sequence[float], np.ndarray]


class InvalidModelError(Exception):
    """Raised when a posterior model cannot be built from the given data."""

    def __init__(self, message: str):
        self.message = message

    def __str__(self) -> str:
        return f"Invalid posterior model: {self.message}"


class DomainError(ValueError):
    """Raised for points outside of [0, 1]^d."""


def as_points(x: PointLike, dimension: int) -> np.ndarray:
    """Convert `x` to a (n, dimension) float array and check it lies in the unit cube."""
    points = np.asarray(x, dtype=float)
    if points.ndim == 0:
        points = points.reshape(1, 1)
    elif points.ndim == 1:
        points = points.reshape(-1, dimension) if dimension == 1 else points.reshape(1, -1)
    if points.shape[1] != dimension:
        raise DomainError(f"Expected points of dimension {dimension}, got shape {points.shape}")
    if np.any(points < 0.0) or np.any(points > 1.0) or np.any(np.isnan(points)):
        raise DomainError(f"Points must lie in [0, 1]^{dimension}")
    return points


class PosteriorModel(abc.ABC):
    """Base class for posterior models eta on [0, 1]^d."""

    kind: str
    dimension: int
    smoothness: float
    """Declared Hoelder exponent; metadata for the algorithms, never verified."""

    @abc.abstractmethod
    def eta(self, x: PointLike) -> np.ndarray:
        """Evaluate eta at one or many points; always returns a 1-d array."""

    def eta_at(self, x: PointLike) -> float:
        return float(self.eta(x)[0])

    @abc.abstractmethod
    def as_piecewise(self) -> "PiecewiseConstantPosterior":
        """Return a piecewise-constant model with the same (or tabulated) posterior."""

    def positive_mass(self) -> float:
        """Return p, the integral of eta over the unit cube."""
        return self.as_piecewise().positive_mass()

    @abc.abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        """JSON-compatible representation, see :func:`model_from_dict`."""

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")


class PiecewiseConstantPosterior(PosteriorModel):
    """eta constant on each of a finite set of disjoint axis-aligned boxes covering [0, 1]^d.

    Boxes are half-open `[lo, hi)` except on the upper boundary of the cube.
    """

    def __init__(
        self,
        lo: np.ndarray,
        hi: np.ndarray,
        values: np.ndarray,
        smoothness: float = 1.0,
        kind: str = PIECEWISE_CONSTANT,
    ):
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        if lo.ndim == 1:
            lo, hi = lo[:, None], hi[:, None]
        values = np.asarray(values, dtype=float).reshape(-1)
        if kind not in (PIECEWISE_CONSTANT, TABULATED):
            raise InvalidModelError(f"unexpected kind `{kind}` for a piecewise model")
        if lo.shape != hi.shape or lo.shape[0] != values.size or values.size == 0:
            raise InvalidModelError("cell bounds and values have inconsistent shapes")
        if np.any(lo < 0.0) or np.any(hi > 1.0) or np.any(hi <= lo):
            raise InvalidModelError("every cell must be a non-empty box inside [0, 1]^d")
        if np.any(values < 0.0) or np.any(values > 1.0) or np.any(np.isnan(values)):
            raise InvalidModelError("cell values must lie in [0, 1]")
        if smoothness <= 0:
            raise InvalidModelError(f"smoothness must be positive, got {smoothness}")
        widths = np.prod(hi - lo, axis=1)
        if abs(widths.sum() - 1.0) > WIDTH_TOLERANCE:
            raise InvalidModelError(f"cell widths sum to {widths.sum()!r}, expected 1")

        self.kind = kind
        self.dimension = lo.shape[1]
        self.smoothness = float(smoothness)
        self.lo = lo
        self.hi = hi
        self.values = values
        self.widths = widths
        # 1-d models are located by bisection on the sorted lower bounds.
        self._order = np.argsort(lo[:, 0], kind="stable") if self.dimension == 1 else None

    @classmethod
    def from_intervals(
        cls,
        bounds: Sequence[float],
        values: Sequence[float],
        smoothness: float = 1.0,
        kind: str = PIECEWISE_CONSTANT,
    ) -> "PiecewiseConstantPosterior":
        """Build a 1-d model from cell boundaries `0 = b_0 < b_1 < ... < b_K = 1`."""
        edges = np.asarray(bounds, dtype=float)
        return cls(edges[:-1, None], edges[1:, None], values, smoothness=smoothness, kind=kind)

    @classmethod
    def uniform_grid(
        cls,
        values: np.ndarray,
        smoothness: float = 1.0,
        kind: str = PIECEWISE_CONSTANT,
    ) -> "PiecewiseConstantPosterior":
        """Build a model on the uniform grid whose cell values are given by a d-dim array."""
        values = np.asarray(values, dtype=float)
        shape = values.shape
        index = np.stack(np.unravel_index(np.arange(values.size), shape), axis=1)
        sides = np.asarray(shape, dtype=float)
        return cls(index / sides, (index + 1) / sides, values.reshape(-1), smoothness, kind)

    @classmethod
    def constant(cls, value: float, dimension: int = 1, smoothness: float = 1.0):
        return cls(np.zeros((1, dimension)), np.ones((1, dimension)), [value], smoothness)

    def __len__(self) -> int:
        return self.values.size

    def __repr__(self) -> str:
        return (
            f"PiecewiseConstantPosterior(d={self.dimension}, cells={len(self)}, kind={self.kind})"
        )

    def cell_of(self, x: PointLike) -> np.ndarray:
        """Index of the model cell containing each point."""
        points = as_points(x, self.dimension)
        if self._order is not None:
            sorted_lo = self.lo[self._order, 0]
            pos = np.searchsorted(sorted_lo, points[:, 0], side="right") - 1
            return self._order[np.clip(pos, 0, len(self) - 1)]
        p = points[:, None, :]
        below_hi = (p < self.hi[None]) | ((self.hi[None] == 1.0) & (p == 1.0))
        inside = np.all((p >= self.lo[None]) & below_hi, axis=2)
        if not np.all(inside.any(axis=1)):
            raise DomainError("point not covered by any model cell")
        return inside.argmax(axis=1)

    def eta(self, x: PointLike) -> np.ndarray:
        return self.values[self.cell_of(x)]

    def as_piecewise(self) -> "PiecewiseConstantPosterior":
        return self

    def positive_mass(self) -> float:
        return float(np.dot(self.widths, self.values))

    def box_masses(self, lo: np.ndarray, hi: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Volume and positive mass (integral of eta) of each query box `[lo, hi)`."""
        lo = np.asarray(lo, dtype=float).reshape(-1, self.dimension)
        hi = np.asarray(hi, dtype=float).reshape(-1, self.dimension)
        volumes = np.prod(hi - lo, axis=1)
        masses = np.empty(lo.shape[0])
        batch = max(1, _OVERLAP_BATCH // len(self))
        for start in range(0, lo.shape[0], batch):
            q_lo = lo[start : start + batch, None, :]
            q_hi = hi[start : start + batch, None, :]
            sides = np.minimum(q_hi, self.hi[None]) - np.maximum(q_lo, self.lo[None])
            overlap = np.prod(np.clip(sides, 0.0, None), axis=2)
            masses[start : start + batch] = overlap @ self.values
        return volumes, masses

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "d": self.dimension,
            "beta": self.smoothness,
            "cells": _cells_to_list(self.lo, self.hi, self.values),
        }


class AnalyticPosterior(PosteriorModel):
    """eta given by a vectorized callable mapping an (n, d) array to n probabilities."""

    kind = ANALYTIC_CALLABLE

    def __init__(
        self,
        function: Callable[[np.ndarray], np.ndarray],
        dimension: int = 1,
        smoothness: float = 1.0,
        cells_per_axis: Optional[int] = None,
    ):
        if dimension not in TABULATION_CELLS_PER_AXIS and cells_per_axis is None:
            raise InvalidModelError(f"unsupported dimension {dimension}")
        self.function = function
        self.dimension = dimension
        self.smoothness = float(smoothness)
        self.cells_per_axis = cells_per_axis or TABULATION_CELLS_PER_AXIS[dimension]
        self._table: Optional[PiecewiseConstantPosterior] = None

    def eta(self, x: PointLike) -> np.ndarray:
        values = np.asarray(self.function(as_points(x, self.dimension)), dtype=float).reshape(-1)
        return np.clip(values, 0.0, 1.0)

    def as_piecewise(self) -> PiecewiseConstantPosterior:
        """Tabulate eta at the cell centres of a uniform grid (computed once)."""
        if self._table is None:
            n = self.cells_per_axis
            axis = (np.arange(n) + 0.5) / n
            mesh = np.stack(np.meshgrid(*([axis] * self.dimension), indexing="ij"), axis=-1)
            values = self.eta(mesh.reshape(-1, self.dimension)).reshape((n,) * self.dimension)
            self._table = PiecewiseConstantPosterior.uniform_grid(
                values, self.smoothness, kind=TABULATED
            )
        return self._table

    def positive_mass(self) -> float:
        def integrand(*coords: float) -> float:
            return self.eta_at(np.asarray(coords))

        value, _ = integrate.nquad(
            integrand,
            [(0.0, 1.0)] * self.dimension,
            opts={"epsabs": QUADRATURE_TOLERANCE, "epsrel": QUADRATURE_TOLERANCE},
        )
        return float(value)

    def to_dict(self) -> Dict[str, Any]:
        raise InvalidModelError("analytic models cannot be serialized, tabulate them first")


class GaussianLabelPosterior(PosteriorModel):
    """Continuous labels Y ~ Normal(m(x), sigma^2) with piecewise-constant mean m.

    The binary posterior is the exceedance probability eta_rho(x) = P(Y >= rho | X = x).
    """

    kind = CONTINUOUS_LABEL_GAUSSIAN

    def __init__(
        self,
        lo: np.ndarray,
        hi: np.ndarray,
        means: Sequence[float],
        sigma: float,
        rho: float,
        smoothness: float = 1.0,
    ):
        if not sigma > 0 or not math.isfinite(sigma):
            raise InvalidModelError(f"sigma must be positive, got {sigma}")
        if not math.isfinite(rho):
            raise InvalidModelError(f"rho must be finite, got {rho}")
        self.cell_means = np.asarray(means, dtype=float).reshape(-1)
        if not np.all(np.isfinite(self.cell_means)):
            raise InvalidModelError("cell means must be finite")
        self.sigma = float(sigma)
        self.rho = float(rho)
        self._thresholded = PiecewiseConstantPosterior(
            lo,
            hi,
            stats.norm.sf((self.rho - self.cell_means) / self.sigma),
            smoothness=smoothness,
        )
        self.dimension = self._thresholded.dimension
        self.smoothness = self._thresholded.smoothness

    @classmethod
    def uniform_grid(
        cls, means: Sequence[float], sigma: float, rho: float, smoothness: float = 1.0
    ) -> "GaussianLabelPosterior":
        """1-d model with equal-width cells carrying the given means."""
        edges = np.linspace(0.0, 1.0, len(means) + 1)
        return cls(edges[:-1], edges[1:], means, sigma, rho, smoothness)

    def mean(self, x: PointLike) -> np.ndarray:
        return self.cell_means[self._thresholded.cell_of(x)]

    def eta(self, x: PointLike) -> np.ndarray:
        return self._thresholded.eta(x)

    def as_piecewise(self) -> PiecewiseConstantPosterior:
        return self._thresholded

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "d": self.dimension,
            "beta": self.smoothness,
            "sigma": self.sigma,
            "rho": self.rho,
            "cells": _cells_to_list(
                self._thresholded.lo, self._thresholded.hi, self.cell_means
            ),
        }


def _cells_to_list(lo: np.ndarray, hi: np.ndarray, values: np.ndarray) -> list:
    if lo.shape[1] == 1:
        return [[float(a), float(b), float(v)] for a, b, v in zip(lo[:, 0], hi[:, 0], values)]
    return [[a.tolist(), b.tolist(), float(v)] for a, b, v in zip(lo, hi, values)]


def _cells_from_list(cells: Any, dimension: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    if not isinstance(cells, list) or not cells:
        raise InvalidModelError("`cells` must be a non-empty list")
    lo, hi, values = [], [], []
    for n, cell in enumerate(cells):
        try:
            a, b, v = cell
            lo.append(np.broadcast_to(np.asarray(a, dtype=float), (dimension,)))
            hi.append(np.broadcast_to(np.asarray(b, dtype=float), (dimension,)))
            values.append(float(v))
        except (TypeError, ValueError) as e:
            raise InvalidModelError(f"cell #{n} is malformed: {cell!r}") from e
    return np.array(lo), np.array(hi), np.array(values)


def model_from_dict(data: Dict[str, Any]) -> PosteriorModel:
    """Rebuild a model from its JSON representation `{kind, cells, beta, d, ...}`."""
    if not isinstance(data, dict):
        raise InvalidModelError("model description must be a JSON object")
    kind = data.get("kind", PIECEWISE_CONSTANT)
    try:
        dimension = int(data.get("d", 1))
        beta = float(data.get("beta", 1.0))
    except (TypeError, ValueError) as e:
        raise InvalidModelError("`d` and `beta` must be numbers") from e
    if dimension < 1:
        raise InvalidModelError(f"dimension must be positive, got {dimension}")
    lo, hi, values = _cells_from_list(data.get("cells"), dimension)

    if kind in (PIECEWISE_CONSTANT, TABULATED):
        return PiecewiseConstantPosterior(lo, hi, values, smoothness=beta, kind=kind)
    if kind == CONTINUOUS_LABEL_GAUSSIAN:
        try:
            sigma = float(data["sigma"])
            rho = float(data["rho"])
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidModelError("gaussian models need numeric `sigma` and `rho`") from e
        return GaussianLabelPosterior(lo, hi, values, sigma, rho, smoothness=beta)
    raise InvalidModelError(f"unsupported model kind `{kind}`")


def load_model(path: Union[str, Path]) -> PosteriorModel:
    """Read a model JSON file; malformed JSON is reported as :class:`InvalidModelError`."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InvalidModelError(f"{path} is not valid JSON: {e}") from e
    return model_from_dict(data)
