"""Broken-line ROC curves of the true posterior and of cell rankings, and the sup-norm regret.

A scoring rule is given as a :class:`ScoringOutput`: a ranked set of points, each owning
an axis-aligned cell. Only leaf cells own a region of the unit cube; together they
partition it.
"""
import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, List, Optional, Sequence, Tuple, Union

from more_itertools import split_when
import numpy as np
from typing_extensions import Final

from activerank.env.models import PosteriorModel

NON_DYADIC: Final[int] = -1


class RocUndefinedError(ValueError):
    """The ROC curve is undefined when the positive mass p is 0 or 1."""

    def __init__(self, p: float):
        self.p = p

    def __str__(self) -> str:
        return f"ROC curve undefined for positive mass p = {self.p}"


@dataclass(frozen=True)
class RocCurve:
    """Piecewise-linear ROC curve through `(alpha[k], tpr[k])`.

    `alpha` is non-decreasing. A vertical segment (cells with eta = 1) keeps both of its
    end points; the curve takes the upper one, the left limit the lower one.
    """

    alpha: np.ndarray
    tpr: np.ndarray

    @property
    def breakpoints(self) -> List[Tuple[float, float]]:
        return [(float(a), float(r)) for a, r in zip(self.alpha, self.tpr)]

    def _interpolate(self, alpha: np.ndarray, after: np.ndarray) -> np.ndarray:
        """Value on the segment ending at breakpoint `after`, or at the last breakpoint."""
        after = np.clip(after, 1, self.alpha.size - 1)
        a0, a1 = self.alpha[after - 1], self.alpha[after]
        r0, r1 = self.tpr[after - 1], self.tpr[after]
        span = a1 - a0
        with np.errstate(invalid="ignore", divide="ignore"):
            share = np.where(span > 0, (alpha - a0) / span, 1.0)
        return r0 + np.clip(share, 0.0, 1.0) * (r1 - r0)

    def __call__(self, alpha: Union[float, np.ndarray]) -> np.ndarray:
        points = np.asarray(alpha, dtype=float)
        after = np.searchsorted(self.alpha, points, side="right")
        upper = self.tpr[np.clip(after - 1, 0, None)]
        at_break = (after > 0) & (self.alpha[np.clip(after - 1, 0, None)] == points)
        return np.where(at_break, upper, self._interpolate(points, after))

    def left_limit(self, alpha: Union[float, np.ndarray]) -> np.ndarray:
        """Limit of the curve from the left at `alpha` > 0."""
        points = np.asarray(alpha, dtype=float)
        first = np.searchsorted(self.alpha, points, side="left")
        return self._interpolate(points, first)

    def __len__(self) -> int:
        return self.alpha.size

    def write_csv(self, path: Union[str, Path]) -> None:
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(["alpha", "tpr"])
            writer.writerows(self.breakpoints)


@dataclass(frozen=True)
class ScoredPoint:
    location: Tuple[float, ...]
    level: Optional[int]
    rank: int
    score: Optional[float]
    leaf: bool


@dataclass(frozen=True)
class ScoringOutput:
    """A ranked point set. Rank 1 is the lowest score; ranks are a permutation of 1..n.

    `lo`/`hi` are the cells owned by the points; `scores` is nan for never-sampled points.
    `levels` holds :data:`NON_DYADIC` for cells of a non-dyadic grid.
    """

    locations: np.ndarray
    levels: np.ndarray
    ranks: np.ndarray
    scores: np.ndarray
    leaf: np.ndarray
    lo: np.ndarray
    hi: np.ndarray

    def __len__(self) -> int:
        return self.ranks.size

    @property
    def points(self) -> Iterator[ScoredPoint]:
        for n in range(len(self)):
            score = float(self.scores[n])
            yield ScoredPoint(
                location=tuple(float(c) for c in self.locations[n]),
                level=None if self.levels[n] == NON_DYADIC else int(self.levels[n]),
                rank=int(self.ranks[n]),
                score=None if np.isnan(score) else score,
                leaf=bool(self.leaf[n]),
            )

    def rank_of(self, x: Sequence[float]) -> int:
        """Rank assigned to an arbitrary point `x` of the unit cube."""
        point = np.asarray(x, dtype=float).reshape(1, -1)
        inside = np.all(
            (point >= self.lo) & ((point < self.hi) | ((self.hi == 1.0) & (point == 1.0))), axis=1
        )
        owners = np.flatnonzero(inside & self.leaf)
        if owners.size == 0:
            raise ValueError(f"{x} is not covered by the scoring partition")
        return int(self.ranks[owners[0]])

    def to_rows(self) -> List[list]:
        """`[*location, level, rank]` rows, as stored in run records."""
        return [[*p.location, p.level, p.rank] for p in self.points]


def _curve_from_masses(widths: np.ndarray, masses: np.ndarray, p: float) -> RocCurve:
    """Cumulate cell widths and positive masses, taken in decreasing score order."""
    if not 0.0 < p < 1.0:
        raise RocUndefinedError(p)
    alpha = np.concatenate([[0.0], np.cumsum(widths - masses) / (1.0 - p)])
    tpr = np.concatenate([[0.0], np.cumsum(masses) / p])
    alpha = np.clip(alpha, 0.0, 1.0)
    tpr = np.clip(tpr, 0.0, 1.0)
    alpha[-1] = tpr[-1] = 1.0
    alpha = np.maximum.accumulate(alpha)
    tpr = np.maximum.accumulate(tpr)
    return RocCurve(alpha=alpha, tpr=tpr)


def _group_starts(scores: np.ndarray) -> np.ndarray:
    """Start index of every run of consecutive equal scores (nan equals nan)."""

    def differ(i: int, j: int) -> bool:
        a, b = scores[i], scores[j]
        return not (a == b or (np.isnan(a) and np.isnan(b)))

    return np.array([group[0] for group in split_when(range(scores.size), differ)], dtype=int)


def optimal_roc(model: PosteriorModel) -> RocCurve:
    """ROC curve of the true posterior; cells with equal eta share one segment."""
    table = model.as_piecewise()
    p = table.positive_mass()
    if not 0.0 < p < 1.0:
        raise RocUndefinedError(p)
    order = np.argsort(-table.values, kind="stable")
    values = table.values[order]
    widths = table.widths[order]
    starts = _group_starts(values)
    group_widths = np.add.reduceat(widths, starts)
    group_masses = np.add.reduceat(widths * values, starts)
    return _curve_from_masses(group_widths, group_masses, p)


def scoring_roc(model: PosteriorModel, scoring: ScoringOutput) -> RocCurve:
    """ROC curve of a scoring rule on `model`.

    Leaf cells are taken by decreasing rank; consecutive cells with equal scores are merged
    into a single segment.
    """
    table = model.as_piecewise()
    p = table.positive_mass()
    if not 0.0 < p < 1.0:
        raise RocUndefinedError(p)
    leaves = np.flatnonzero(scoring.leaf)
    leaves = leaves[np.argsort(-scoring.ranks[leaves], kind="stable")]
    widths, masses = table.box_masses(scoring.lo[leaves], scoring.hi[leaves])
    starts = _group_starts(scoring.scores[leaves])
    return _curve_from_masses(
        np.add.reduceat(widths, starts), np.add.reduceat(masses, starts), p
    )


def sup_regret(opt: RocCurve, cand: RocCurve) -> float:
    """sup over alpha of opt(alpha) - cand(alpha), floored at 0.

    Both curves are piecewise linear, so the supremum is reached at a breakpoint, either at
    its value or as the limit from the left when one of the curves jumps there.
    """
    alphas = np.union1d(opt.alpha, cand.alpha)
    gaps = opt(alphas) - cand(alphas)
    inner = alphas[alphas > 0]
    left = opt.left_limit(inner) - cand.left_limit(inner) if inner.size else np.zeros(1)
    return float(max(gaps.max(), left.max(), 0.0))


def regret_of(model: PosteriorModel, scoring: ScoringOutput) -> float:
    return sup_regret(optimal_roc(model), scoring_roc(model, scoring))
