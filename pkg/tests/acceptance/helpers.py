import math
from typing import List

import numpy as np

from activerank.record import RunRecord

# Exploration constant of the KL runs here; c = 1 needs hours per replicate.
CALIBRATED_C = 0.01


def pac_threshold(delta: float, runs: int) -> float:
    """Largest failure fraction compatible with PAC(epsilon, delta), two binomial sigmas up."""
    return delta + 2 * math.sqrt(delta * (1 - delta) / runs)


def failure_fraction(records: List[RunRecord], epsilon: float) -> float:
    return sum(r.terminal_regret > epsilon for r in records) / len(records)


def leaf_ranks(record: RunRecord, below: float) -> tuple:
    """Ranks of the terminal leaf points left and right of `below` on the first axis."""
    scoring = record.scoring
    x = scoring.locations[:, 0]
    left = scoring.ranks[scoring.leaf & (x < below)]
    right = scoring.ranks[scoring.leaf & (x >= below)]
    return left, right


def median(values) -> float:
    return float(np.median(np.asarray(list(values), dtype=float)))
