"""KL-divergence confidence bounds for Bernoulli means and the DKW radius.

KL bounds are found by safeguarded Newton iterations on the convex divergence, started from
the Pinsker bracket; the DKW radius by bisection. Both stop at absolute tolerance
:data:`BISECTION_TOLERANCE` on the probability axis.
"""
from dataclasses import dataclass, replace
import functools
import math
from typing import Optional

from scipy import optimize, special
from typing_extensions import Final

BISECTION_TOLERANCE: Final[float] = 1e-9

MIN_WIDTH: Final[float] = 1e-12
"""Smallest confidence width stored for a point; keeps `width^(-d/beta)` finite."""

# Lower end of the DKW search interval; the residual is always negative there.
_DKW_FLOOR: Final[float] = 1e-12

# Closest a Newton iterate gets to 0 or 1, where kl(mean, .) is infinite.
_EDGE: Final[float] = 1e-15

_MAX_ITERATIONS: Final[int] = 100


@dataclass(frozen=True)
class PointStats:
    """Sample statistics of a single queried point (or of the uniform side channel)."""

    pulls: int = 0
    successes: int = 0
    last_width: float = 1.0
    """Confidence width computed at the previous update; 1.0 before the first one."""

    def __post_init__(self):
        if self.pulls < 0 or self.successes < 0 or self.successes > self.pulls:
            raise ValueError(f"Invalid counts: successes={self.successes}, pulls={self.pulls}")
        if not 0.0 < self.last_width <= 1.0:
            raise ValueError(f"Confidence width must lie in (0, 1], got {self.last_width}")

    @property
    def mean(self) -> Optional[float]:
        """Empirical mean, `None` when the point was never sampled."""
        if self.pulls == 0:
            return None
        return self.successes / self.pulls

    def observe(self, label: int) -> "PointStats":
        """Return the statistics after one more binary observation."""
        return replace(self, pulls=self.pulls + 1, successes=self.successes + int(label))

    def with_width(self, width: float) -> "PointStats":
        return replace(self, last_width=clamp_width(width))


def clamp_width(width: float) -> float:
    return min(max(width, MIN_WIDTH), 1.0)


def _check_probability(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0 or math.isnan(value):
        raise ValueError(f"`{name}` must be a probability, got {value}")


def _check_budget(budget: float) -> None:
    if budget < 0:
        raise ValueError(f"Budget must be non-negative, got {budget}")


def bernoulli_kl(a: float, b: float) -> float:
    """Kullback-Leibler divergence between Bernoulli(a) and Bernoulli(b).

    Uses the convention 0 * log(0 / x) = 0 and returns `inf` when `b` is 0 or 1 and `a != b`.
    """
    _check_probability("a", a)
    _check_probability("b", b)
    if a == b:
        return 0.0
    return float(special.rel_entr(a, b) + special.rel_entr(1.0 - a, 1.0 - b))


def _kl(mean: float, q: float) -> float:
    """kl(mean, q) for 0 < q < 1, without argument checks."""
    result = 0.0
    if mean > 0.0:
        result += mean * math.log(mean / q)
    if mean < 1.0:
        result += (1.0 - mean) * math.log((1.0 - mean) / (1.0 - q))
    return result


def _newton(mean: float, budget: float, q: float) -> float:
    """Solve kl(mean, q) = budget from a start `q` with kl(mean, q) >= budget.

    kl(mean, .) is convex with its minimum at `mean`, so the iterates move monotonically
    towards `mean` and never step over the root.
    """
    for _ in range(_MAX_ITERATIONS):
        slope = (q - mean) / (q * (1.0 - q))
        if slope == 0.0:
            break
        step = (_kl(mean, q) - budget) / slope
        q -= step
        if abs(step) <= BISECTION_TOLERANCE:
            break
    return q


def _upper(mean: float, budget: float) -> float:
    if budget == 0.0 or mean == 1.0:
        return mean
    if mean == 0.0:
        return -math.expm1(-budget)
    # kl(mean, q) >= budget at both starts: by Pinsker, and by dropping mean * ln(1 / q)
    pinsker = mean + math.sqrt(budget / 2.0)
    tail = 1.0 - (1.0 - mean) * math.exp(-(budget - mean * math.log(mean)) / (1.0 - mean))
    start = min(pinsker, tail)
    if start >= 1.0 - _EDGE:
        return 1.0
    return min(max(_newton(mean, budget, start), mean), 1.0)


def _lower(mean: float, budget: float) -> float:
    if budget == 0.0 or mean == 0.0:
        return mean
    if mean == 1.0:
        return math.exp(-budget)
    pinsker = mean - math.sqrt(budget / 2.0)
    tail = mean * math.exp(-(budget - (1.0 - mean) * math.log(1.0 - mean)) / mean)
    start = max(pinsker, tail)
    if start <= _EDGE:
        return 0.0
    return min(max(_newton(mean, budget, start), 0.0), mean)


def kl_upper(mean: float, budget: float) -> float:
    """Largest `q` in [mean, 1] with kl(mean, q) <= budget."""
    _check_probability("mean", mean)
    _check_budget(budget)
    return _upper(mean, budget)


def kl_lower(mean: float, budget: float) -> float:
    """Smallest `q` in [0, mean] with kl(mean, q) <= budget."""
    _check_probability("mean", mean)
    _check_budget(budget)
    return _lower(mean, budget)


def _require_sampled(stats: PointStats) -> float:
    mean = stats.mean
    if mean is None:
        raise ValueError("Confidence bounds need at least one sample (N = 0)")
    return mean


def kl_ucb(stats: PointStats, budget: float) -> float:
    """KL upper confidence bound of `stats`; `budget` is the exploration rate divided by N."""
    return kl_upper(_require_sampled(stats), budget)


def kl_lcb(stats: PointStats, budget: float) -> float:
    """KL lower confidence bound of `stats`; `budget` is the exploration rate divided by N."""
    return kl_lower(_require_sampled(stats), budget)


def kl_width(mean: float, budget: float) -> float:
    """Width of the KL confidence interval around `mean`."""
    _check_probability("mean", mean)
    _check_budget(budget)
    return _upper(mean, budget) - _lower(mean, budget)


def exploration_rate(
    t: int, width: float, delta: float, c: float = 1.0, d_over_beta: float = 1.0
) -> float:
    """Return c * ln(t^2 * width^(-d_over_beta) / delta)."""
    if t < 1:
        raise ValueError(f"Time must be positive, got {t}")
    if not 0.0 < width <= 1.0:
        raise ValueError(f"Width must lie in (0, 1], got {width}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"`delta` must lie in (0, 1), got {delta}")
    if c <= 0 or d_over_beta <= 0:
        raise ValueError("`c` and `d_over_beta` must be positive")
    return c * (2.0 * math.log(t) - d_over_beta * math.log(width) - math.log(delta))


@functools.lru_cache(maxsize=65536)
def dkw_radius(t: int, delta: float, d_over_beta: float = 1.0) -> float:
    """Smallest radius in (0, 1] with radius >= sqrt(ln(t^2 * radius^(-d_over_beta) / delta) / t).

    Returns 1.0 when no radius below 1 satisfies the inequality.
    """
    if t < 1:
        raise ValueError(f"Round count must be positive, got {t}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"`delta` must lie in (0, 1), got {delta}")

    log_scale = 2.0 * math.log(t) - math.log(delta)

    def residual(radius: float) -> float:
        log_term = log_scale - d_over_beta * math.log(radius)
        return radius - math.sqrt(max(log_term, 0.0) / t)

    if residual(1.0) <= 0.0:
        return 1.0
    return optimize.bisect(residual, _DKW_FLOOR, 1.0, xtol=BISECTION_TOLERANCE)
