"""Files written by experiments and by the oracle command.

Tabular results of a run start with a `# config_hash: <hash>` line and contain no timing
data, so reruns of the same config produce byte-identical files.
"""
import csv
from pathlib import Path
from typing import IO, Iterable, List, Sequence, Union

import numpy as np
from typing_extensions import Final

from activerank.env.models import PosteriorModel
from activerank.env.oracle import KL_VARIANT, gap_profile
from activerank.record import RunRecord
from activerank.roc import optimal_roc

SUMMARY_FILE: Final[str] = "summary.csv"
CHECKPOINTS_FILE: Final[str] = "checkpoints.csv"
REGRET_CURVE_FILE: Final[str] = "regret_curve.csv"
GAP_PROFILE_FILE: Final[str] = "gap_profile.csv"
ROC_STAR_FILE: Final[str] = "roc_star.csv"

PathLike = Union[str, Path]


def record_file_name(replicate: int) -> str:
    return f"replicate_{replicate:03d}.json"


def _csv_writer(f: IO[str], config_hash: str):
    f.write(f"# config_hash: {config_hash}\n")
    return csv.writer(f, lineterminator="\n")


def _flag(value: bool) -> str:
    return "true" if value else "false"


def write_record(directory: PathLike, record: RunRecord) -> Path:
    path = Path(directory) / record_file_name(record.replicate)
    path.write_text(record.to_json(), encoding="utf-8")
    return path


def write_summary(path: PathLike, config_hash: str, records: Iterable[RunRecord]) -> Path:
    """One `replicate,seed,tau,terminal_regret,cap_hit` row per record."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = _csv_writer(f, config_hash)
        writer.writerow(["replicate", "seed", "tau", "terminal_regret", "cap_hit"])
        for record in records:
            writer.writerow(
                [
                    record.replicate,
                    record.seed,
                    record.tau,
                    repr(record.terminal_regret),
                    _flag(record.cap_hit),
                ]
            )
    return Path(path)


def write_checkpoints(path: PathLike, config_hash: str, records: Iterable[RunRecord]) -> Path:
    """Long-form `replicate,t,regret` rows."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = _csv_writer(f, config_hash)
        writer.writerow(["replicate", "t", "regret"])
        for record in records:
            for t, regret in record.checkpoints:
                writer.writerow([record.replicate, t, repr(regret)])
    return Path(path)


def regret_curve(records: Sequence[RunRecord], epsilon: float) -> List[list]:
    """`[t, median, mean, failure_rate]` per budget, over all replicates.

    The failure rate is the fraction of replicates whose regret at that budget exceeds
    `epsilon`.
    """
    if not records:
        return []
    budgets = [t for t, _ in records[0].checkpoints]
    regrets = np.array([[r for _, r in record.checkpoints] for record in records], dtype=float)
    rows = []
    for n, t in enumerate(budgets):
        column = regrets[:, n]
        rows.append(
            [
                t,
                float(np.median(column)),
                float(np.mean(column)),
                float(np.mean(column > epsilon)),
            ]
        )
    return rows


def write_regret_curve(
    path: PathLike, config_hash: str, records: Sequence[RunRecord], epsilon: float
) -> Path:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = _csv_writer(f, config_hash)
        writer.writerow(["t", "median_regret", "mean_regret", "failure_rate"])
        for t, median, mean, failure_rate in regret_curve(records, epsilon):
            writer.writerow([t, repr(median), repr(mean), repr(failure_rate)])
    return Path(path)


def write_gap_profile(
    path: PathLike,
    model: PosteriorModel,
    epsilon: float,
    points: int = 1000,
    variant: str = KL_VARIANT,
) -> Path:
    """Columns `x` (or `x1..xd`), `eta`, `gap`, `H` on the report grid."""
    grid, eta, gaps, h = gap_profile(model, epsilon, points, variant)
    if model.dimension == 1:
        coords = ["x"]
    else:
        coords = [f"x{j + 1}" for j in range(model.dimension)]
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow([*coords, "eta", "gap", "H"])
        for x, *values in zip(grid, eta, gaps, h):
            writer.writerow([repr(float(v)) for v in (*x, *values)])
    return Path(path)


def write_roc_star(path: PathLike, model: PosteriorModel) -> Path:
    """Breakpoints `alpha,tpr` of the optimal ROC curve of `model`."""
    optimal_roc(model).write_csv(path)
    return Path(path)
