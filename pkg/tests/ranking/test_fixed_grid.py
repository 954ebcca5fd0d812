import numpy as np
import pytest

from activerank.env.sampling import BernoulliLabelSampler
from activerank.ranking.base import InvalidParametersError, RankingParams
from activerank.confidence import PointStats
from activerank.ranking.fixed_grid import FixedGridRank
from activerank.ranking.grid import Cell, uniform_cells
from activerank.ranking.klcrank import KLCRank
from activerank.roc import regret_of
from tests.factories.models import PiecewiseModelFactory


def make_fixed_grid(grid_size, model=None, seed=0, **params):
    model = model or PiecewiseModelFactory()
    params = {"epsilon": 0.5, "delta": 0.1, "c": 0.05, **params}
    sampler = BernoulliLabelSampler(model)
    return FixedGridRank(RankingParams(**params), sampler, np.random.default_rng(seed), grid_size)


def test_grid_points():
    algorithm = make_fixed_grid(4)
    assert [c.center for c in algorithm.active_cells()] == [(0.125,), (0.375,), (0.625,), (0.875,)]
    assert algorithm.grid_size == 4
    assert algorithm.baseline == "fixed_grid"


def test_grid_is_never_refined():
    algorithm = make_fixed_grid(4, seed=1)
    for _ in range(3000):
        if algorithm.finished:
            break
        algorithm.step()
    assert len(algorithm.points) == 4


def test_two_point_grid_recovers_the_two_cell_problem():
    model = PiecewiseModelFactory()
    algorithm = make_fixed_grid(2, model, seed=3)
    while not algorithm.finished and algorithm.samples < 200_000:
        algorithm.step()
    assert algorithm.finished
    assert regret_of(model, algorithm.scoring) == 0.0


@pytest.mark.parametrize("grid_size", [0, 1])
def test_grid_size_must_be_at_least_two(grid_size):
    with pytest.raises(InvalidParametersError):
        make_fixed_grid(grid_size)


def make_klcrank_on_grid(grid_size, model, seed, **params):
    params = {"epsilon": 0.5, "delta": 0.1, "c": 0.05, **params}
    sampler = BernoulliLabelSampler(model)
    return KLCRank(
        RankingParams(**params),
        sampler,
        np.random.default_rng(seed),
        initial_cells=uniform_cells(grid_size, 1),
    )


def test_matches_klcrank_started_on_the_same_grid():
    model = PiecewiseModelFactory()
    fixed = make_fixed_grid(4, model, seed=9)
    adaptive = make_klcrank_on_grid(4, model, seed=9)
    steps = 0
    while not fixed.finished and len(adaptive.points) == 4:
        fixed.step()
        adaptive.step()
        assert fixed.samples == adaptive.samples
        assert fixed.p_stats == adaptive.p_stats
        if len(adaptive.points) > 4:
            break
        steps += 1
        for column in ("pulls", "successes", "width", "active"):
            np.testing.assert_array_equal(
                getattr(fixed.points, column)[:4], getattr(adaptive.points, column)[:4]
            )
    assert steps > 10


def test_forced_statistics_give_the_same_decisions():
    model = PiecewiseModelFactory()
    fixed = make_fixed_grid(4, model)
    adaptive = make_klcrank_on_grid(4, model, seed=0)
    for algorithm in (fixed, adaptive):
        algorithm.p_stats = PointStats(pulls=400, successes=200, last_width=0.05)
        algorithm.points.pulls[:4] = [200, 200, 200, 200]
        algorithm.points.successes[:4] = [10, 30, 170, 190]
        algorithm.points.width[:4] = [0.02, 0.03, 0.01, 0.03]
    assert fixed.points.widest_active() == adaptive.points.widest_active() == 1
    np.testing.assert_array_equal(fixed.elimination_set(), adaptive.elimination_set())


def test_non_dyadic_grid_has_no_level():
    assert Cell(100, (0,)).level is None
    assert Cell(4, (1,)).level == 2
    algorithm = make_fixed_grid(3)
    assert [p.level for p in algorithm.provisional_scoring().points] == [None, None, None]
    algorithm = make_fixed_grid(4)
    assert [p.level for p in algorithm.provisional_scoring().points] == [2, 2, 2, 2]
