"""Active ranking algorithms and the loop that runs them."""
from activerank.ranking.base import (
    ContractViolation,
    InvalidParametersError,
    RankingAlgorithm,
    RankingParams,
    elimination_mask,
    refinement_level,
)
from activerank.ranking.fixed_grid import FixedGridRank
from activerank.ranking.grid import Cell, PointTable
from activerank.ranking.klcrank import ActiveState, KLCRank
from activerank.ranking.kltcrank import KLTCRank, RoundState
from activerank.ranking.runner import (
    ALGORITHMS,
    DEFAULT_CHECKPOINTS,
    DEFAULT_SAMPLE_CAP,
    build_algorithm,
    run_to_completion,
)

__all__ = (
    "ALGORITHMS",
    "ActiveState",
    "Cell",
    "ContractViolation",
    "DEFAULT_CHECKPOINTS",
    "DEFAULT_SAMPLE_CAP",
    "FixedGridRank",
    "InvalidParametersError",
    "KLCRank",
    "KLTCRank",
    "PointTable",
    "RankingAlgorithm",
    "RankingParams",
    "RoundState",
    "build_algorithm",
    "elimination_mask",
    "refinement_level",
    "run_to_completion",
)
