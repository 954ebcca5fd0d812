"""Running a ranking algorithm to completion while tracking its regret at sample budgets."""
from collections import deque
import time
from typing import Deque, Iterable, List, Optional, Tuple

import numpy as np
from typing_extensions import Final

from activerank.env.models import PosteriorModel
from activerank.env.sampling import BernoulliLabelSampler, ContinuousLabelSampler
from activerank.ranking.base import InvalidParametersError, RankingAlgorithm, RankingParams
from activerank.ranking.fixed_grid import FixedGridRank
from activerank.ranking.klcrank import KLCRank
from activerank.ranking.kltcrank import KLTCRank
from activerank.record import RunRecord
from activerank.roc import optimal_roc, scoring_roc, sup_regret
from activerank.utils import get_logger

logger = get_logger(__name__)

DEFAULT_SAMPLE_CAP: Final[int] = 10 ** 7
DEFAULT_CHECKPOINTS: Final[Tuple[int, ...]] = (1000, 3000, 10000, 30000, 100000)

ALGORITHMS: Final = ("klcrank", "kltcrank", "fixed_grid")


def build_algorithm(
    name: str,
    params: RankingParams,
    model: PosteriorModel,
    rng: np.random.Generator,
    *,
    grid_size: Optional[int] = None,
    rho: Optional[float] = None,
) -> RankingAlgorithm:
    """Create algorithm `name` with a label sampler over `model`.

    The algorithm only receives the sampler; the model stays with the caller.
    """
    if name == "klcrank":
        return KLCRank(params, BernoulliLabelSampler(model), rng)
    if name == "fixed_grid":
        if grid_size is None:
            raise InvalidParametersError("the fixed_grid baseline needs a grid size K")
        return FixedGridRank(params, BernoulliLabelSampler(model), rng, grid_size)
    if name == "kltcrank":
        if rho is None:
            raise InvalidParametersError("kltcrank needs a threshold rho")
        return KLTCRank(params, ContinuousLabelSampler(model), rng, rho)
    raise InvalidParametersError(f"unknown algorithm `{name}`, expected one of {ALGORITHMS}")


def run_to_completion(
    algorithm: RankingAlgorithm,
    model: PosteriorModel,
    checkpoints: Iterable[int] = DEFAULT_CHECKPOINTS,
    sample_cap: int = DEFAULT_SAMPLE_CAP,
    replicate: Optional[int] = None,
) -> RunRecord:
    """Step `algorithm` until its active region is empty or `sample_cap` samples were drawn.

    The regret at budget `b` is that of the provisional scoring when the sample count first
    reaches `b`; budgets beyond the stopping time get the terminal regret.
    """
    started = time.perf_counter()
    optimal = optimal_roc(model)

    def regret(scoring) -> float:
        return sup_regret(optimal, scoring_roc(model, scoring))

    pending: Deque[int] = deque(sorted(set(int(b) for b in checkpoints)))
    recorded: List[Tuple[int, float]] = []

    def record_reached() -> None:
        if pending and pending[0] <= algorithm.samples:
            value = regret(algorithm.provisional_scoring())
            while pending and pending[0] <= algorithm.samples:
                recorded.append((pending.popleft(), value))

    record_reached()
    while not algorithm.finished and algorithm.samples < sample_cap:
        algorithm.step(sample_limit=min(sample_cap, pending[0]) if pending else sample_cap)
        record_reached()

    cap_hit = not algorithm.finished
    terminal = algorithm.provisional_scoring()
    terminal_regret = regret(terminal)
    recorded.extend((budget, terminal_regret) for budget in pending)

    if cap_hit:
        logger.warning(
            "Sample cap of %d reached with %d active cells",
            sample_cap,
            len(algorithm.points.active_ids),
            replicate=replicate,
        )
    logger.debug(
        "Run finished after %d samples, terminal regret %.4g",
        algorithm.samples,
        terminal_regret,
        replicate=replicate,
    )
    return RunRecord(
        tau=algorithm.samples,
        cap_hit=cap_hit,
        checkpoints=tuple(recorded),
        terminal_regret=terminal_regret,
        scoring=terminal,
        variant=algorithm.variant,
        baseline=algorithm.baseline,
        K=algorithm.grid_size,
        rho=algorithm.threshold,
        rounds=algorithm.rounds,
        points=len(algorithm.points),
        wall_clock_ms=(time.perf_counter() - started) * 1000.0,
    )
