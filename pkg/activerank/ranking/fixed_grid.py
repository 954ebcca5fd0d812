"""Uniform-grid baseline: the KL elimination machinery on a frozen grid of K^d cells."""
from typing import Optional

import numpy as np

from activerank.env.sampling import LabelSampler
from activerank.ranking.base import InvalidParametersError, RankingParams
from activerank.ranking.grid import uniform_cells
from activerank.ranking.klcrank import KLCRank


class FixedGridRank(KLCRank):
    """:class:`KLCRank` with the point set fixed at the centres of the uniform K-grid."""

    baseline = "fixed_grid"

    def __init__(
        self,
        params: RankingParams,
        sampler: LabelSampler,
        rng: np.random.Generator,
        grid_size: int,
    ):
        if grid_size < 2:
            raise InvalidParametersError(f"the grid needs K >= 2 cells per axis, got {grid_size}")
        self._grid_size = grid_size
        super().__init__(
            params, sampler, rng, initial_cells=uniform_cells(grid_size, params.dimension)
        )

    @property
    def grid_size(self) -> Optional[int]:
        return self._grid_size

    def _refine(self) -> int:
        return 0
