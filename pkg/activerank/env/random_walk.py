"""Random-walk posteriors on equal-width cells of [0, 1]."""
from typing import Optional, Tuple

import numpy as np
from scipy import stats
from typing_extensions import Final

from activerank.env.models import InvalidModelError, PiecewiseConstantPosterior

DEFAULT_STEPS: Final[int] = 100
DEFAULT_NOISE_SCALE: Final[float] = 0.05
DEFAULT_BAND: Final[Tuple[float, float]] = (0.05, 0.95)
DEFAULT_START: Final[float] = 0.5

SCENARIO_1_STAY_PROB: Final[float] = 0.9
SCENARIO_2_STAY_PROB: Final[float] = 0.0


def generate_random_walk_posterior(
    steps: int = DEFAULT_STEPS,
    stay_prob: float = SCENARIO_1_STAY_PROB,
    noise_scale: float = DEFAULT_NOISE_SCALE,
    seed: Optional[int] = None,
    *,
    band: Tuple[float, float] = DEFAULT_BAND,
    start: float = DEFAULT_START,
    smoothness: float = 1.0,
) -> PiecewiseConstantPosterior:
    """Piecewise-constant eta whose cell values follow a lazy truncated-Gaussian random walk.

    With probability `stay_prob` the walk keeps its value; otherwise it moves by a centred
    Gaussian increment truncated so that the walk stays inside `band`.
    """
    low, high = band
    if steps < 2:
        raise InvalidModelError(f"a random walk needs at least 2 steps, got {steps}")
    if not 0.0 <= stay_prob <= 1.0:
        raise InvalidModelError(f"stay_prob must be a probability, got {stay_prob}")
    if noise_scale <= 0:
        raise InvalidModelError(f"noise_scale must be positive, got {noise_scale}")
    if not 0.0 <= low < high <= 1.0 or not low <= start <= high:
        raise InvalidModelError(f"invalid band {band} for start {start}")

    rng = np.random.default_rng(seed)
    values = np.empty(steps)
    values[0] = start
    for t in range(1, steps):
        current = values[t - 1]
        if rng.random() < stay_prob:
            values[t] = current
            continue
        increment = stats.truncnorm.rvs(
            (low - current) / noise_scale,
            (high - current) / noise_scale,
            loc=0.0,
            scale=noise_scale,
            random_state=rng,
        )
        values[t] = min(max(current + increment, low), high)
    return PiecewiseConstantPosterior.uniform_grid(values, smoothness=smoothness)
