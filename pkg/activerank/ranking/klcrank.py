"""Adaptive-discretization elimination with KL confidence bounds (binary labels)."""
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from activerank.confidence import PointStats, clamp_width, exploration_rate, kl_width
from activerank.env.sampling import LabelSampler
from activerank.ranking.base import RankingAlgorithm, RankingParams
from activerank.ranking.grid import Cell, PointTable
from activerank.roc import ScoringOutput


@dataclass
class ActiveState:
    """Snapshot view of a running :class:`KLCRank`."""

    t: int
    points: PointTable
    p_stats: PointStats
    params: RankingParams

    @property
    def active_cells(self) -> List[Cell]:
        return self.points.active_cells()


class KLCRank(RankingAlgorithm):
    """Active ranking by KL-confidence elimination over adaptively refined dyadic cells.

    Each :meth:`step` either draws uniform samples to sharpen the positive-mass estimate
    `p_hat`, or samples the active point with the widest confidence interval; it then
    eliminates settled cells and refines the active region to match the widest width.
    """

    variant = "kl"

    def __init__(
        self,
        params: RankingParams,
        sampler: LabelSampler,
        rng: np.random.Generator,
        initial_cells: Optional[list] = None,
    ):
        if sampler.dimension != params.dimension:
            raise ValueError(
                f"sampler dimension {sampler.dimension} != params dimension {params.dimension}"
            )
        super().__init__(params, initial_cells or self.initial_dyadic_cells(params.dimension))
        self._sampler = sampler
        self._rng = rng
        self.p_stats = PointStats()

    @property
    def state(self) -> ActiveState:
        return ActiveState(self.samples, self.points, self.p_stats, self.params)

    def p_estimate(self) -> Optional[float]:
        return self.p_stats.mean

    def _width(self, successes: int, pulls: int, last_width: float) -> float:
        rate = exploration_rate(
            self.samples, last_width, self.params.delta, self.params.c, self.params.d_over_beta
        )
        return kl_width(successes / pulls, rate / pulls)

    def _sample_p(self) -> None:
        label = self._sampler.draw_uniform(self._rng)
        self.samples += 1
        stats = self.p_stats.observe(int(label))
        width = self._width(stats.successes, stats.pulls, stats.last_width)
        self.p_stats = stats.with_width(width)

    def _sample_point(self, i: int) -> None:
        pts = self.points
        label = self._sampler.draw(pts.center(i), self._rng)
        self.samples += 1
        pts.pulls[i] += 1
        pts.successes[i] += int(label)
        width = self._width(int(pts.successes[i]), int(pts.pulls[i]), float(pts.width[i]))
        pts.width[i] = clamp_width(width)

    def step(self, sample_limit: Optional[int] = None) -> Optional[ScoringOutput]:
        self._check_running()
        widest = self.widest_active_width()
        if self.p_stats.last_width >= widest:
            while True:
                self._sample_p()
                if self.p_stats.last_width <= widest:
                    break
                if sample_limit is not None and self.samples >= sample_limit:
                    break
        else:
            self._sample_point(self.points.widest_active())

        self._eliminate()
        if self._finish_if_empty() is None:
            self._refine()
        return self._scoring
