"""Grid cells and the growing table of queried points.

A cell of resolution `r` and integer index `k` is the box prod_j [k_j / r, (k_j + 1) / r).
Dyadic cells have power-of-two resolution; their level is log2(r). Every point of the
table is the centre of its cell; centres of dyadic cells of different levels never coincide.
"""
from dataclasses import dataclass
import itertools
from typing import Iterator, List, Optional, Tuple

import numpy as np

from activerank.roc import NON_DYADIC, ScoringOutput


def dyadic_level(resolution: int) -> Optional[int]:
    """log2 of a power-of-two resolution, `None` otherwise."""
    if resolution < 1 or resolution & (resolution - 1):
        return None
    return resolution.bit_length() - 1


@dataclass(frozen=True)
class Cell:
    resolution: int
    index: Tuple[int, ...]

    @property
    def level(self) -> Optional[int]:
        return dyadic_level(self.resolution)

    @property
    def lo(self) -> Tuple[float, ...]:
        return tuple(k / self.resolution for k in self.index)

    @property
    def hi(self) -> Tuple[float, ...]:
        return tuple((k + 1) / self.resolution for k in self.index)

    @property
    def center(self) -> Tuple[float, ...]:
        return tuple((k + 0.5) / self.resolution for k in self.index)

    @property
    def side(self) -> float:
        return 1.0 / self.resolution

    def children(self, factor: int = 2) -> Iterator["Cell"]:
        """Sub-cells of resolution `resolution * factor`, in lexicographic index order."""
        offsets = itertools.product(range(factor), repeat=len(self.index))
        for offset in offsets:
            yield Cell(
                self.resolution * factor, tuple(k * factor + o for k, o in zip(self.index, offset))
            )


def uniform_cells(resolution: int, dimension: int) -> List[Cell]:
    """All cells of the uniform grid of given resolution, in lexicographic order."""
    return [
        Cell(resolution, index)
        for index in itertools.product(range(resolution), repeat=dimension)
    ]


class PointTable:
    """Statistics of all queried points, stored column-wise in growing numpy arrays.

    Points are never removed. A point is `active` while its cell is part of the active
    region; a point is a `leaf` while its cell has not been subdivided. The `active` column
    is changed only through :meth:`add`, :meth:`subdivide` and :meth:`deactivate`.
    """

    def __init__(self, dimension: int, capacity: int = 64):
        self.dimension = dimension
        self.size = 0
        self.index = np.zeros((capacity, dimension), dtype=np.int64)
        self.resolution = np.zeros(capacity, dtype=np.int64)
        self.pulls = np.zeros(capacity, dtype=np.int64)
        self.successes = np.zeros(capacity, dtype=np.int64)
        self.width = np.ones(capacity)
        self.active = np.zeros(capacity, dtype=bool)
        self.leaf = np.zeros(capacity, dtype=bool)
        self._active_ids: Optional[np.ndarray] = None
        self._active_order: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return self.size

    def _grow(self, needed: int) -> None:
        capacity = self.resolution.size
        if needed <= capacity:
            return
        new_capacity = max(needed, 2 * capacity)
        for name in ("index", "resolution", "pulls", "successes", "width", "active", "leaf"):
            old = getattr(self, name)
            fill = 1.0 if name == "width" else 0
            new = np.full((new_capacity,) + old.shape[1:], fill, dtype=old.dtype)
            new[: self.size] = old[: self.size]
            setattr(self, name, new)

    def _active_changed(self) -> None:
        self._active_ids = None
        self._active_order = None

    def add(self, cells: List[Cell]) -> np.ndarray:
        """Append fresh, active leaf points at the centres of `cells`; return their ids."""
        start = self.size
        self._grow(start + len(cells))
        ids = np.arange(start, start + len(cells))
        if cells:
            self.index[ids] = [c.index for c in cells]
            self.resolution[ids] = [c.resolution for c in cells]
        self.pulls[ids] = 0
        self.successes[ids] = 0
        self.width[ids] = 1.0
        self.active[ids] = True
        self.leaf[ids] = True
        self.size += len(cells)
        self._active_changed()
        return ids

    def deactivate(self, ids: np.ndarray) -> None:
        """Remove the cells of `ids` from the active region; their statistics are kept."""
        self.active[ids] = False
        self._active_changed()

    def cell(self, i: int) -> Cell:
        return Cell(int(self.resolution[i]), tuple(int(k) for k in self.index[i]))

    @property
    def centers(self) -> np.ndarray:
        n = self.size
        return (self.index[:n] + 0.5) / self.resolution[:n, None]

    def center(self, i: int) -> np.ndarray:
        return (self.index[i] + 0.5) / self.resolution[i]

    @property
    def active_ids(self) -> np.ndarray:
        if self._active_ids is None:
            self._active_ids = np.flatnonzero(self.active[: self.size])
        return self._active_ids

    @property
    def active_order(self) -> np.ndarray:
        """Active ids in tie-break order, see :meth:`tie_order`."""
        if self._active_order is None:
            self._active_order = self.tie_order(self.active_ids)
        return self._active_order

    def active_cells(self) -> List[Cell]:
        return [self.cell(i) for i in self.active_ids]

    def active_measure(self) -> float:
        ids = self.active_ids
        return float(np.sum(self.resolution[ids].astype(float) ** -self.dimension))

    def means(self, ids: Optional[np.ndarray] = None) -> np.ndarray:
        """Empirical means; nan for never-sampled points."""
        if ids is None:
            ids = np.arange(self.size)
        pulls = self.pulls[ids]
        return np.divide(
            self.successes[ids], pulls, out=np.full(pulls.size, np.nan), where=pulls > 0
        )

    def tie_order(self, ids: np.ndarray) -> np.ndarray:
        """`ids` sorted deeper cells first, then lexicographically by centre."""
        centers = (self.index[ids] + 0.5) / self.resolution[ids, None]
        keys = [centers[:, j] for j in reversed(range(self.dimension))]
        keys.append(-self.resolution[ids])
        return ids[np.lexsort(keys)]

    def widest_active(self) -> int:
        """Active point with the largest confidence width, ties broken by :meth:`tie_order`."""
        order = self.active_order
        # argmax returns the first maximum, i.e. the first in tie-break order
        return int(order[np.argmax(self.width[order])])

    def max_active_width(self) -> float:
        ids = self.active_ids
        return float(self.width[ids].max()) if ids.size else 0.0

    def subdivide(self, ids: np.ndarray, resolution: int) -> np.ndarray:
        """Replace the cells of `ids` by their sub-cells of the given (finer) resolution."""
        children: List[Cell] = []
        for i in ids:
            parent = self.cell(int(i))
            factor = resolution // parent.resolution
            children.extend(parent.children(factor))
        self.deactivate(ids)
        self.leaf[ids] = False
        return self.add(children)

    def scoring(self) -> ScoringOutput:
        """Rank all points by (sampled, empirical mean, centre); rank 1 is the lowest."""
        n = self.size
        ids = np.arange(n)
        centers = self.centers
        means = self.means(ids)
        sampled = self.pulls[:n] > 0
        keys = [centers[:, j] for j in reversed(range(self.dimension))]
        keys.extend([np.nan_to_num(means, nan=-1.0), sampled])
        order = np.lexsort(keys)
        ranks = np.empty(n, dtype=np.int64)
        ranks[order] = np.arange(1, n + 1)
        resolution = self.resolution[:n]
        levels = [dyadic_level(int(r)) for r in resolution]
        return ScoringOutput(
            locations=centers,
            levels=np.array([NON_DYADIC if v is None else v for v in levels], dtype=np.int64),
            ranks=ranks,
            scores=means,
            leaf=self.leaf[:n].copy(),
            lo=self.index[:n] / resolution[:, None],
            hi=(self.index[:n] + 1) / resolution[:, None],
        )
