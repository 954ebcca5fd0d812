import abc
from dataclasses import dataclass
import math
from typing import ClassVar, Optional

import numpy as np

from activerank.ranking.grid import Cell, PointTable, uniform_cells
from activerank.roc import ScoringOutput
from activerank.utils import get_logger

logger = get_logger(__name__)

# Radius of the neighbourhood counted by the elimination rule, in units of the widest width.
NEIGHBOURHOOD_FACTOR = 6.0


class InvalidParametersError(ValueError):
    pass


class ContractViolation(RuntimeError):
    """An algorithm was used outside of its contract, e.g. stepped after it finished."""


@dataclass(frozen=True)
class RankingParams:
    epsilon: float
    delta: float
    smoothness: float = 1.0
    dimension: int = 1
    c: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise InvalidParametersError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if not 0.0 < self.delta < 1.0:
            raise InvalidParametersError(f"delta must lie in (0, 1), got {self.delta}")
        if not self.smoothness > 0 or not self.c > 0:
            raise InvalidParametersError("smoothness and c must be positive")
        if self.dimension < 1:
            raise InvalidParametersError(f"dimension must be at least 1, got {self.dimension}")

    @property
    def d_over_beta(self) -> float:
        return self.dimension / self.smoothness


def elimination_mask(
    means: np.ndarray, widest: float, p_hat: float, params: RankingParams
) -> np.ndarray:
    """Which of the active points with empirical `means` satisfy the elimination rule.

    Point i is eliminated when
    `widest <= min(eps * p_hat / (widest^(d/beta) * |U_i|), 1) * (1 - mean_i)`, where U_i
    counts the active points whose means are within `6 * widest` of mean_i. Never-sampled
    points (nan means) are neither eliminated nor counted.
    """
    result = np.zeros(means.size, dtype=bool)
    sampled = ~np.isnan(means)
    if not sampled.any():
        return result
    values = means[sampled]
    ordered = np.sort(values)
    radius = NEIGHBOURHOOD_FACTOR * widest
    neighbours = np.searchsorted(ordered, values + radius, side="right") - np.searchsorted(
        ordered, values - radius, side="left"
    )
    scale = params.epsilon * p_hat / (widest ** params.d_over_beta * neighbours)
    bound = np.minimum(scale, 1.0) * (1.0 - values)
    result[sampled] = widest <= bound
    return result


def refinement_level(widest: float, smoothness: float) -> int:
    """Smallest n >= 0 with 2^(-n) <= widest^(1/smoothness)."""
    if widest >= 1.0:
        return 0
    n = math.ceil(-math.log2(widest) / smoothness - 1e-12)
    while 2.0 ** (-n) > widest ** (1.0 / smoothness):
        n += 1
    return max(n, 0)


class RankingAlgorithm(abc.ABC):
    """Common bookkeeping of the elimination-based ranking algorithms.

    Subclasses decide how samples are drawn in :meth:`step`.
    """

    variant: ClassVar[str]
    baseline: ClassVar[Optional[str]] = None

    def __init__(self, params: RankingParams, initial_cells: list):
        self.params = params
        self.points = PointTable(params.dimension)
        self.points.add(initial_cells)
        self.samples = 0
        self._scoring: Optional[ScoringOutput] = None

    @staticmethod
    def initial_dyadic_cells(dimension: int) -> list:
        """The 2^d cells of side 1/2."""
        return uniform_cells(2, dimension)

    @property
    def finished(self) -> bool:
        return self._scoring is not None

    @property
    def scoring(self) -> Optional[ScoringOutput]:
        """Terminal scoring, available once the active region is empty."""
        return self._scoring

    @property
    def rounds(self) -> Optional[int]:
        return None

    @property
    def grid_size(self) -> Optional[int]:
        return None

    @property
    def threshold(self) -> Optional[float]:
        return None

    @abc.abstractmethod
    def step(self, sample_limit: Optional[int] = None) -> Optional[ScoringOutput]:
        """Run one iteration; return the terminal scoring if the run just finished.

        An iteration that loops on uniform draws stops once `sample_limit` samples were
        drawn in total. A round that samples every active point is atomic and may pass it.
        """

    @abc.abstractmethod
    def p_estimate(self) -> Optional[float]:
        """Current estimate of the positive mass, `None` before any uniform draw."""

    def provisional_scoring(self) -> ScoringOutput:
        return self._scoring or self.points.scoring()

    def active_cells(self):
        return self.points.active_cells()

    def widest_active_width(self) -> float:
        return self.points.max_active_width()

    def elimination_set(self) -> np.ndarray:
        """Ids of active points the elimination rule would remove now (ignoring the p/4 guard)."""
        ids = self.points.active_ids
        p_hat = self.p_estimate()
        if ids.size == 0 or p_hat is None:
            return ids[:0]
        mask = elimination_mask(
            self.points.means(ids), self.widest_active_width(), p_hat, self.params
        )
        return ids[mask]

    def _eliminate(self) -> int:
        """Apply the elimination rule when the widest width is at most p_hat / 4."""
        p_hat = self.p_estimate()
        widest = self.widest_active_width()
        if p_hat is None or widest > p_hat / 4.0:
            return 0
        eliminated = self.elimination_set()
        if eliminated.size:
            self.points.deactivate(eliminated)
            logger.debug(
                "Eliminated %d cells at t=%d (widest width %.4g, p_hat %.4g)",
                eliminated.size,
                self.samples,
                widest,
                p_hat,
            )
        return eliminated.size

    def _refine(self) -> int:
        """Subdivide active cells coarser than the level required by the widest width."""
        ids = self.points.active_ids
        if ids.size == 0:
            return 0
        level = refinement_level(self.widest_active_width(), self.params.smoothness)
        resolution = 2 ** level
        coarse = ids[self.points.resolution[ids] < resolution]
        if coarse.size == 0:
            return 0
        added = self.points.subdivide(coarse, resolution)
        logger.debug("Refined %d cells to level %d at t=%d", coarse.size, level, self.samples)
        return added.size

    def _finish_if_empty(self) -> Optional[ScoringOutput]:
        if self.points.active_ids.size == 0:
            self._scoring = self.points.scoring()
            return self._scoring
        return None

    def _check_running(self) -> None:
        if self.finished:
            raise ContractViolation("the active region is empty; the run has already finished")
