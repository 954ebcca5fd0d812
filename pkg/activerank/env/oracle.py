"""Exact problem-side quantities: positive mass p, gaps and per-point complexity.

For a piecewise-constant eta the measure L(z) of `{y : |eta(x) - eta(y)| <= z}` is a
right-continuous step function of `z`, so the gap is found by scanning its jump points.
"""
from dataclasses import dataclass
import math
from typing import Tuple

import numpy as np
from scipy import special
from typing_extensions import Final

from activerank.env.models import PointLike, PosteriorModel, as_points

KL_VARIANT: Final[str] = "kl"
DKW_VARIANT: Final[str] = "dkw"


class DegeneratePointError(ValueError):
    """The gap at the point is zero, so its complexity is undefined."""

    def __init__(self, eta: float):
        self.eta = eta

    def __str__(self) -> str:
        return f"Degenerate point with eta(x) = {self.eta}: the gap is 0"


@dataclass(frozen=True)
class GapProfile:
    x: Tuple[float, ...]
    eta_x: float
    gap: float
    complexity: float


def positive_mass(model: PosteriorModel) -> float:
    """p, the integral of eta over [0, 1]^d."""
    return model.positive_mass()


def _kl_array(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return special.rel_entr(a, b) + special.rel_entr(1.0 - a, 1.0 - b)


def gaps_for_levels(
    levels: np.ndarray, values: np.ndarray, widths: np.ndarray, epsilon: float, p: float
) -> np.ndarray:
    """Gap for each posterior level in `levels` on a model with cell `values` and `widths`.

    Levels with a zero target (eta = 1 or p = 0) get a gap of 0.
    """
    levels = np.asarray(levels, dtype=float).reshape(-1)
    result = np.zeros(levels.size)
    for n, level in enumerate(levels):
        target = epsilon * p * (1.0 - level)
        if target <= 0.0:
            continue
        distance = np.abs(values - level)
        order = np.argsort(distance, kind="stable")
        jumps = distance[order]
        mass = np.cumsum(widths[order])
        # keep the last index of every run of equal jump points
        last = np.append(jumps[1:] != jumps[:-1], True)
        jumps, mass = jumps[last], mass[last]
        upper = np.append(jumps[1:], np.inf)
        candidates = np.maximum(jumps, target / mass)
        accepted = np.flatnonzero(candidates < upper)
        gap = candidates[accepted[0]]
        result[n] = min(gap, 1.0 - level)
    return result


def complexity_for(
    levels: np.ndarray, gaps: np.ndarray, d_over_beta: float, variant: str = KL_VARIANT
) -> np.ndarray:
    """Per-point complexity H from posterior levels and their gaps."""
    if variant == DKW_VARIANT:
        return gaps ** (-d_over_beta - 2.0)
    if variant != KL_VARIANT:
        raise ValueError(f"Unknown complexity variant `{variant}`")
    lower = np.clip(levels - gaps, 0.0, 1.0)
    upper = np.clip(levels + gaps, 0.0, 1.0)
    with np.errstate(divide="ignore"):
        return gaps ** (-d_over_beta) / _kl_array(lower, upper)


def gap(
    model: PosteriorModel, x: PointLike, epsilon: float, variant: str = KL_VARIANT
) -> GapProfile:
    """Gap of `model` at `x` together with the complexity H(x)."""
    if epsilon <= 0:
        raise ValueError(f"`epsilon` must be positive, got {epsilon}")
    point = as_points(x, model.dimension)[0]
    table = model.as_piecewise()
    eta_x = float(table.eta(point)[0])
    p = table.positive_mass()
    value = float(gaps_for_levels(np.array([eta_x]), table.values, table.widths, epsilon, p)[0])
    if value <= 0.0:
        raise DegeneratePointError(eta_x)
    d_over_beta = model.dimension / model.smoothness
    h = float(complexity_for(np.array([eta_x]), np.array([value]), d_over_beta, variant)[0])
    return GapProfile(x=tuple(float(c) for c in point), eta_x=eta_x, gap=value, complexity=h)


def cell_complexities(
    model: PosteriorModel, epsilon: float, variant: str = KL_VARIANT
) -> Tuple[np.ndarray, np.ndarray]:
    """Gap and complexity of every cell of the (tabulated) model; 0 and inf where degenerate."""
    if epsilon <= 0:
        raise ValueError(f"`epsilon` must be positive, got {epsilon}")
    table = model.as_piecewise()
    p = table.positive_mass()
    levels, inverse = np.unique(table.values, return_inverse=True)
    gaps = gaps_for_levels(levels, table.values, table.widths, epsilon, p)
    safe_gaps = np.where(gaps > 0, gaps, 1.0)
    d_over_beta = table.dimension / table.smoothness
    h = np.where(gaps > 0, complexity_for(levels, safe_gaps, d_over_beta, variant), np.inf)
    return gaps[inverse], h[inverse]


def total_complexity(model: PosteriorModel, epsilon: float, variant: str = KL_VARIANT) -> float:
    """Integral of H over the unit cube, excluding cells with eta = 1."""
    table = model.as_piecewise()
    if table.positive_mass() <= 0.0:
        return math.inf
    _, h = cell_complexities(table, epsilon, variant)
    keep = table.values < 1.0
    return float(np.dot(table.widths[keep], h[keep]))


def sampling_time_scale(
    model: PosteriorModel, epsilon: float, delta: float, variant: str = KL_VARIANT
) -> float:
    """Integral of H * ln(H / delta): the shape of the expected sampling time bound."""
    table = model.as_piecewise()
    _, h = cell_complexities(table, epsilon, variant)
    keep = (table.values < 1.0) & np.isfinite(h) & (h > 0)
    return float(np.dot(table.widths[keep], h[keep] * np.log(h[keep] / delta)))


def profile_grid(dimension: int, points: int = 1000) -> np.ndarray:
    """Grid of about `points` cell centres used by the gap profile report."""
    per_axis = points if dimension == 1 else int(math.ceil(points ** (1.0 / dimension)))
    axis = (np.arange(per_axis) + 0.5) / per_axis
    mesh = np.meshgrid(*([axis] * dimension), indexing="ij")
    return np.stack(mesh, axis=-1).reshape(-1, dimension)


def gap_profile(
    model: PosteriorModel, epsilon: float, points: int = 1000, variant: str = KL_VARIANT
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(grid, eta, gap, H) on the report grid; degenerate points carry gap 0 and H = inf."""
    grid = profile_grid(model.dimension, points)
    table = model.as_piecewise()
    cells = table.cell_of(grid)
    gaps, h = cell_complexities(table, epsilon, variant)
    return grid, table.values[cells], gaps[cells], h[cells]
