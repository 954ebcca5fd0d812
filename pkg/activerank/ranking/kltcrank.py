"""Round-based variant for continuous labels with DKW confidence radii.

Labels are reduced to the indicator 1{Y >= rho}. Every round draws one uniform sample for
the global exceedance estimate and one sample at every active point. Points added by
refinement start with no samples; each point's radius is the DKW radius of its own sample
count and the widest radius drives elimination and refinement.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from activerank.confidence import dkw_radius
from activerank.env.sampling import LabelSampler
from activerank.ranking.base import RankingAlgorithm, RankingParams
from activerank.ranking.grid import PointTable
from activerank.roc import ScoringOutput


@dataclass
class RoundState:
    round: int
    points: PointTable
    global_pulls: int
    global_successes: int
    radius: float
    rho: float
    params: RankingParams

    @property
    def global_estimate(self) -> Optional[float]:
        if self.global_pulls == 0:
            return None
        return self.global_successes / self.global_pulls


class KLTCRank(RankingAlgorithm):
    variant = "dkw"

    def __init__(
        self,
        params: RankingParams,
        sampler: LabelSampler,
        rng: np.random.Generator,
        rho: float,
        initial_cells: Optional[list] = None,
    ):
        super().__init__(params, initial_cells or self.initial_dyadic_cells(params.dimension))
        self._sampler = sampler
        self._rng = rng
        self.rho = float(rho)
        self._round = 0
        self.global_pulls = 0
        self.global_successes = 0

    @property
    def rounds(self) -> Optional[int]:
        return self._round

    @property
    def threshold(self) -> Optional[float]:
        return self.rho

    @property
    def state(self) -> RoundState:
        return RoundState(
            round=self._round,
            points=self.points,
            global_pulls=self.global_pulls,
            global_successes=self.global_successes,
            radius=self.widest_active_width(),
            rho=self.rho,
            params=self.params,
        )

    def p_estimate(self) -> Optional[float]:
        return self.state.global_estimate

    def _exceeds(self, labels: np.ndarray) -> np.ndarray:
        if self._sampler.binary:
            return labels.astype(np.int64)
        return (labels >= self.rho).astype(np.int64)

    def play_round(self) -> Optional[ScoringOutput]:
        """Sample the uniform channel and every active point once, then eliminate and refine."""
        self._check_running()
        self._round += 1
        pts = self.points

        global_label = self._sampler.draw_uniform(self._rng)
        self.global_pulls += 1
        self.global_successes += int(self._exceeds(np.array([global_label]))[0])

        ids = pts.active_ids
        labels = self._sampler.draw_many(pts.centers[ids], self._rng)
        pts.pulls[ids] += 1
        pts.successes[ids] += self._exceeds(labels)
        self.samples += 1 + ids.size

        dkw = self.params.d_over_beta
        pts.width[ids] = [dkw_radius(int(n), self.params.delta, dkw) for n in pts.pulls[ids]]

        self._eliminate()
        if self._finish_if_empty() is None:
            self._refine()
        return self._scoring

    def step(self, sample_limit: Optional[int] = None) -> Optional[ScoringOutput]:
        return self.play_round()
