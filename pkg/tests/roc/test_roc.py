import csv

import numpy as np
import pytest

from activerank.env.models import PiecewiseConstantPosterior
from activerank.ranking.grid import PointTable, uniform_cells
from activerank.roc import (
    RocCurve,
    RocUndefinedError,
    optimal_roc,
    regret_of,
    scoring_roc,
    sup_regret,
)
from tests.factories.models import ConstantModelFactory, PiecewiseModelFactory
from tests.factories.record import two_point_scoring


def grid_scoring(successes, pulls=10):
    """Scoring of the uniform grid with one cell per entry of `successes`."""
    table = PointTable(1)
    table.add(uniform_cells(len(successes), 1))
    table.pulls[: len(successes)] = pulls
    table.successes[: len(successes)] = successes
    return table.scoring()


def brute_force_regret(opt: RocCurve, cand: RocCurve) -> float:
    alphas = np.linspace(0.0, 1.0, 10_001)
    return float(max(np.max(opt(alphas) - cand(alphas)), 0.0))


def test_constant_model_is_the_diagonal():
    assert optimal_roc(ConstantModelFactory()).breakpoints == [(0.0, 0.0), (1.0, 1.0)]


def test_two_cell_optimal_curve():
    curve = optimal_roc(PiecewiseModelFactory())
    assert curve.breakpoints == pytest.approx([(0.0, 0.0), (0.2, 0.8), (1.0, 1.0)])


def test_two_cell_reversed_ranking():
    model = PiecewiseModelFactory()
    reversed_curve = scoring_roc(model, two_point_scoring(high_first=False))
    assert reversed_curve.breakpoints == pytest.approx([(0.0, 0.0), (0.8, 0.2), (1.0, 1.0)])
    assert regret_of(model, two_point_scoring(high_first=False)) == pytest.approx(0.75)
    assert brute_force_regret(optimal_roc(model), reversed_curve) == pytest.approx(0.75)


def test_true_ranking_recovers_the_optimal_curve():
    model = PiecewiseModelFactory()
    curve = scoring_roc(model, two_point_scoring())
    assert curve.breakpoints == pytest.approx(optimal_roc(model).breakpoints)
    assert regret_of(model, two_point_scoring()) == 0.0


def test_equal_scores_share_a_segment():
    model = PiecewiseModelFactory(bounds=(0.0, 0.25, 0.5, 1.0), values=(0.9, 0.1, 0.5))
    curve = scoring_roc(model, grid_scoring([5, 5, 5, 5]))
    assert curve.breakpoints == pytest.approx([(0.0, 0.0), (1.0, 1.0)])


def test_optimal_curve_merges_equal_posteriors():
    model = PiecewiseModelFactory(bounds=(0.0, 0.3, 0.6, 1.0), values=(0.7, 0.2, 0.7))
    assert len(optimal_roc(model)) == 3


def test_eta_one_cells_keep_vertical_segments():
    curve = optimal_roc(PiecewiseModelFactory(values=(1.0, 0.0)))
    assert curve.breakpoints == pytest.approx([(0.0, 0.0), (0.0, 1.0), (1.0, 1.0)])
    assert curve(0.0) == pytest.approx(1.0)


def test_regret_takes_the_left_limit_below_a_vertical_segment():
    model = PiecewiseConstantPosterior.uniform_grid([0.2, 1.0, 0.6])
    optimal = optimal_roc(model)
    candidate = scoring_roc(model, grid_scoring([9, 5, 1]))
    assert candidate.breakpoints == pytest.approx(
        [(0.0, 0.0), (2 / 3, 1 / 9), (2 / 3, 2 / 3), (1.0, 1.0)]
    )
    assert candidate(2 / 3) == pytest.approx(2 / 3)
    assert candidate.left_limit(2 / 3) == pytest.approx(1 / 9)
    assert optimal(2 / 3) == pytest.approx(17 / 18)
    assert sup_regret(optimal, candidate) == pytest.approx(5 / 6)
    below = 2 / 3 - np.logspace(-3, -9, 7)
    dense = np.max(optimal(below) - candidate(below))
    assert dense == pytest.approx(5 / 6, abs=1e-3)
    assert dense <= sup_regret(optimal, candidate) + 1e-12


def test_swapping_a_misordered_adjacent_pair_never_increases_regret():
    rng = np.random.default_rng(11)
    for _ in range(20):
        values = rng.random(10)
        model = PiecewiseConstantPosterior.uniform_grid(values)
        optimal = optimal_roc(model)
        successes = rng.permutation(10)
        regret = sup_regret(optimal, scoring_roc(model, grid_scoring(successes)))
        swapped = True
        while swapped:
            swapped = False
            order = np.argsort(-successes)
            for upper, lower in zip(order[:-1], order[1:]):
                if values[upper] < values[lower]:
                    successes[[upper, lower]] = successes[[lower, upper]]
                    new = sup_regret(optimal, scoring_roc(model, grid_scoring(successes)))
                    assert new <= regret + 1e-12
                    regret, swapped = new, True
                    break
        assert regret == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize("value", [0.0, 1.0])
def test_roc_undefined(value):
    model = ConstantModelFactory(value=value)
    with pytest.raises(RocUndefinedError):
        optimal_roc(model)
    with pytest.raises(RocUndefinedError):
        scoring_roc(model, two_point_scoring())


def test_identical_curves_have_no_regret():
    curve = optimal_roc(PiecewiseModelFactory())
    assert sup_regret(curve, curve) == 0.0


def test_random_models_against_brute_force():
    rng = np.random.default_rng(7)
    for _ in range(20):
        values = rng.random(10)
        model = PiecewiseConstantPosterior.uniform_grid(values)
        optimal = optimal_roc(model)
        # concave: slopes decrease along the curve
        slopes = np.diff(optimal.tpr) / np.diff(optimal.alpha)
        assert np.all(np.diff(slopes) <= 1e-9)

        scoring = grid_scoring(rng.permutation(10), pulls=10)
        candidate = scoring_roc(model, scoring)
        assert np.all(candidate(optimal.alpha) <= optimal.tpr + 1e-9)
        regret = sup_regret(optimal, candidate)
        assert 0.0 <= regret <= 1.0
        assert regret == pytest.approx(brute_force_regret(optimal, candidate), abs=1e-6)


def test_scoring_output():
    scoring = two_point_scoring()
    assert len(scoring) == 2
    assert scoring.rank_of([0.1]) == 2
    assert scoring.rank_of([1.0]) == 1
    assert [p.score for p in scoring.points] == [0.8, 0.2]
    assert scoring.to_rows() == [[0.25, 1, 2], [0.75, 1, 1]]


def test_write_csv(tmp_path):
    path = tmp_path / "roc.csv"
    optimal_roc(PiecewiseModelFactory()).write_csv(path)
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["alpha", "tpr"]
    assert [float(v) for v in rows[1]] == [0.0, 0.0]
    assert [float(v) for v in rows[-1]] == [1.0, 1.0]
