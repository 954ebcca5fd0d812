"""Active bipartite ranking: adaptive-discretization algorithms and their Monte Carlo harness."""
from pathlib import Path

from pkg_resources import get_distribution
import toml


def get_version() -> str:
    """
    :return: the version of the activerank package
    """
    pyproject_path = Path(__file__).parents[1] / "pyproject.toml"
    if pyproject_path.exists():
        with open(pyproject_path) as f:
            pyproject = toml.loads(f.read())

        return pyproject["tool"]["poetry"]["version"]

    return get_distribution("activerank").version


__version__: str = get_version()

from activerank.experiment import Experiment, ExperimentConfig, run_experiment  # noqa: E402
from activerank.ranking import KLCRank, KLTCRank, FixedGridRank, RankingParams  # noqa: E402
from activerank.roc import optimal_roc, regret_of  # noqa: E402

__all__ = [
    "Experiment",
    "ExperimentConfig",
    "FixedGridRank",
    "KLCRank",
    "KLTCRank",
    "RankingParams",
    "env",
    "experiment",
    "optimal_roc",
    "ranking",
    "regret_of",
    "run_experiment",
]
