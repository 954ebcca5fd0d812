"""The result of one ranking run."""
from dataclasses import dataclass, field, replace
import json
from typing import Any, Dict, Optional, Tuple

from activerank.roc import ScoringOutput


@dataclass(frozen=True)
class RunRecord:
    tau: int
    """Samples drawn until the active region emptied (or until the cap was hit)."""

    cap_hit: bool
    checkpoints: Tuple[Tuple[int, float], ...]
    """`(budget, regret)` pairs; regrets are computed oracle-side against the true model."""

    terminal_regret: float
    scoring: ScoringOutput = field(repr=False, compare=False)
    variant: str = "kl"
    baseline: Optional[str] = None
    K: Optional[int] = None
    rho: Optional[float] = None
    rounds: Optional[int] = None
    points: int = 0
    config: Optional[Dict[str, Any]] = None
    config_hash: str = ""
    replicate: int = 0
    seed: Optional[int] = None
    wall_clock_ms: float = 0.0

    def with_context(self, **kwargs) -> "RunRecord":
        return replace(self, **kwargs)

    def to_dict(self, include_timing: bool = True) -> Dict[str, Any]:
        data = {
            "config": self.config,
            "config_hash": self.config_hash,
            "replicate": self.replicate,
            "seed": self.seed,
            "variant": self.variant,
            "baseline": self.baseline,
            "K": self.K,
            "rho": self.rho,
            "tau": self.tau,
            "rounds": self.rounds,
            "cap_hit": self.cap_hit,
            "points": self.points,
            "checkpoints": [[t, r] for t, r in self.checkpoints],
            "terminal_regret": self.terminal_regret,
            "scoring": self.scoring.to_rows(),
        }
        if include_timing:
            data["wall_clock_ms"] = self.wall_clock_ms
        return data

    def to_json(self, include_timing: bool = True) -> str:
        return json.dumps(self.to_dict(include_timing), indent=2, sort_keys=False) + "\n"
