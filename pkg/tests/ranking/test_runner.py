import json

import numpy as np
import pytest

from activerank.env.sampling import BernoulliLabelSampler, KindMismatchError
from activerank.ranking.base import InvalidParametersError, RankingParams
from activerank.ranking.fixed_grid import FixedGridRank
from activerank.ranking.klcrank import KLCRank
from activerank.ranking.kltcrank import KLTCRank
from activerank.ranking.runner import build_algorithm, run_to_completion
from tests.factories.models import (
    ConstantModelFactory,
    GaussianModelFactory,
    PiecewiseModelFactory,
)

PARAMS = RankingParams(epsilon=0.1, delta=0.1)


def build(name, model, seed=0, **kwargs):
    return build_algorithm(name, PARAMS, model, np.random.default_rng(seed), **kwargs)


def test_build_algorithm():
    assert isinstance(build("klcrank", PiecewiseModelFactory()), KLCRank)
    assert isinstance(build("fixed_grid", PiecewiseModelFactory(), grid_size=3), FixedGridRank)
    assert isinstance(build("kltcrank", GaussianModelFactory(), rho=0.0), KLTCRank)


@pytest.mark.parametrize(
    "name, model, kwargs, error",
    [
        ("fixed_grid", PiecewiseModelFactory(), {}, InvalidParametersError),
        ("kltcrank", GaussianModelFactory(), {}, InvalidParametersError),
        ("kltcrank", PiecewiseModelFactory(), {"rho": 0.5}, KindMismatchError),
        ("ucb", PiecewiseModelFactory(), {}, InvalidParametersError),
    ],
)
def test_build_algorithm_errors(name, model, kwargs, error):
    with pytest.raises(error):
        build(name, model, **kwargs)


def test_sample_cap():
    model = ConstantModelFactory(value=0.5)
    record = run_to_completion(build("klcrank", model), model, (0, 10, 10 ** 9), sample_cap=500)
    assert record.cap_hit
    assert record.tau == 500
    assert [t for t, _ in record.checkpoints] == [0, 10, 10 ** 9]
    # every scoring of a constant posterior is optimal
    assert all(regret == 0.0 for _, regret in record.checkpoints)
    assert record.terminal_regret == 0.0


def test_checkpoints_track_the_provisional_regret():
    model = PiecewiseModelFactory()
    record = run_to_completion(
        build("klcrank", model, seed=2), model, (2000, 0, 500, 500), sample_cap=2000
    )
    budgets = [t for t, _ in record.checkpoints]
    assert budgets == [0, 500, 2000]
    assert all(0.0 <= regret <= 1.0 for _, regret in record.checkpoints)
    # unsampled points share one score, so the initial curve is the diagonal
    assert record.checkpoints[0][1] == pytest.approx(0.6)
    assert record.checkpoints[-1][1] == record.terminal_regret


def test_budgets_after_the_stopping_time_get_the_terminal_regret():
    model = PiecewiseModelFactory()
    params = RankingParams(epsilon=0.5, delta=0.1, c=0.05)
    algorithm = FixedGridRank(params, BernoulliLabelSampler(model), np.random.default_rng(1), 2)
    record = run_to_completion(algorithm, model, (10 ** 8,), sample_cap=200_000)
    assert not record.cap_hit
    assert record.checkpoints == ((10 ** 8, record.terminal_regret),)
    assert record.tau == algorithm.samples < 200_000
    assert record.baseline == "fixed_grid" and record.K == 2


def test_kltcrank_record_fields():
    model = GaussianModelFactory()
    record = run_to_completion(build("kltcrank", model, rho=0.0), model, (), sample_cap=100)
    assert record.variant == "dkw"
    assert record.rho == 0.0
    assert record.rounds >= 1
    assert record.cap_hit


def test_same_seed_same_record():
    model = PiecewiseModelFactory()
    a = run_to_completion(build("klcrank", model, seed=5), model, (100, 1000), sample_cap=1500)
    b = run_to_completion(build("klcrank", model, seed=5), model, (100, 1000), sample_cap=1500)
    assert a.to_json(include_timing=False) == b.to_json(include_timing=False)
    data = json.loads(a.to_json())
    assert data["tau"] == a.tau
    assert len(data["scoring"]) == a.points
    assert "wall_clock_ms" in data


def test_steps_stop_at_the_next_checkpoint():
    model = ConstantModelFactory(value=0.5)
    algorithm = build("klcrank", model, seed=5)
    step = algorithm.step
    calls = []

    def recorded_step(sample_limit=None):
        result = step(sample_limit=sample_limit)
        calls.append((sample_limit, algorithm.samples))
        return result

    algorithm.step = recorded_step
    record = run_to_completion(algorithm, model, (50, 200), sample_cap=1000)
    limits = [limit for limit, _ in calls]
    assert limits == sorted(limits)
    assert set(limits) == {50, 200, 1000}
    assert all(samples <= limit for limit, samples in calls)
    reached = {samples for _, samples in calls}
    assert {50, 200} <= reached
    assert [t for t, _ in record.checkpoints] == [50, 200]
