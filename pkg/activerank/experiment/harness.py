"""Monte Carlo orchestration of independent replicates of one experiment config.

Replicates run in a worker pool; a single collector coroutine receives their records in
completion order, emits events and writes every artifact. Replicate `r` draws all its
randomness from a stream seeded by `replicate_seed(master_seed, r)`, so the artifacts do
not depend on the number of workers or on scheduling.
"""
import asyncio
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Optional, Tuple, Type, Union

import numpy as np

from activerank import events
from activerank.env.models import PosteriorModel
from activerank.event_dispatcher import AsyncEventDispatcher, EventClassOrName
from activerank.experiment import artifacts
from activerank.experiment.config import ExperimentConfig, resolve_workers
from activerank.experiment.replicate_state import ReplicateState
from activerank.experiment.scenarios import build_model
from activerank.ranking.base import RankingParams
from activerank.ranking.runner import build_algorithm, run_to_completion
from activerank.record import RunRecord
from activerank.utils import get_logger

logger = get_logger(__name__)

ReplicateResult = Union[RunRecord, BaseException]


@dataclass(frozen=True)
class ReplicateJob:
    replicate: int
    seed: int
    config: ExperimentConfig
    model: PosteriorModel


def ranking_params(config: ExperimentConfig, model: PosteriorModel) -> RankingParams:
    return RankingParams(
        epsilon=config.epsilon,
        delta=config.delta,
        smoothness=config.beta,
        dimension=model.dimension,
        c=config.c,
    )


def run_replicate(job: ReplicateJob) -> RunRecord:
    """Run one replicate to completion; executed in the worker pool."""
    config = job.config
    rng = np.random.default_rng(job.seed)
    algorithm = build_algorithm(
        config.algorithm,
        ranking_params(config, job.model),
        job.model,
        rng,
        grid_size=config.K,
        rho=config.rho,
    )
    record = run_to_completion(
        algorithm, job.model, config.checkpoints, config.sample_cap, replicate=job.replicate
    )
    return record.with_context(
        config=config.to_dict(),
        config_hash=config.config_hash,
        replicate=job.replicate,
        seed=job.seed,
    )


class Experiment:
    """Runs the replicates of an :class:`ExperimentConfig` and writes its artifacts.

    Usage::

        async with Experiment(config, workers=4, event_consumer=log_summary()) as experiment:
            records = await experiment.run()
    """

    def __init__(
        self,
        config: ExperimentConfig,
        *,
        workers: Optional[int] = None,
        event_consumer: Optional[Callable[[events.Event], None]] = None,
    ):
        self.config = config
        self.workers = resolve_workers(workers)
        self.output_dir = Path(config.output_dir)
        self.states: Dict[int, ReplicateState] = {}
        self.records: Dict[int, RunRecord] = {}
        self._event_dispatcher = AsyncEventDispatcher()
        if event_consumer:
            self.add_event_consumer(event_consumer)

    def add_event_consumer(
        self,
        event_consumer: Callable[[events.Event], None],
        event_classes_or_names: Iterable[EventClassOrName] = (events.Event,),
    ) -> None:
        """Pass the events of the given classes (all by default) to `event_consumer`.

        Classes may also be given by their names in `activerank.events`.
        """
        self._event_dispatcher.add_event_consumer(event_consumer, event_classes_or_names)

    def emit(self, event_class: Type[events.EventType], **kwargs) -> events.EventType:
        """Emit an event to be consumed by this experiment's event consumers."""
        event = event_class(**kwargs)
        self._event_dispatcher.emit(event)
        return event

    def _emit(self, event_class: Type[events.EventType], **kwargs) -> events.EventType:
        return self.emit(event_class, experiment=self.config, **kwargs)

    async def __aenter__(self) -> "Experiment":
        self._event_dispatcher.start()
        return self

    async def __aexit__(self, *exc_info) -> Optional[bool]:
        if exc_info[0] is not None:
            self.emit(events.ExecutionInterrupted, exc_info=exc_info)  # type: ignore
        await self._event_dispatcher.stop()
        return None

    def _executor(self) -> Executor:
        if self.workers > 1:
            return ProcessPoolExecutor(max_workers=self.workers)
        return ThreadPoolExecutor(max_workers=1)

    def _jobs(self, model: PosteriorModel) -> List[ReplicateJob]:
        return [
            ReplicateJob(r, self.config.replicate_seed(r), self.config, model)
            for r in range(self.config.replicates)
        ]

    async def run(self) -> List[RunRecord]:
        """Run all replicates and write the artifacts; return the records in replicate order.

        A failing replicate is reported by a `ReplicateFailed` event; the first failure is
        re-raised once the remaining replicates were collected.
        """
        config = self.config
        model = build_model(config)
        # invalid algorithm parameters fail here rather than in every replicate
        build_algorithm(
            config.algorithm,
            ranking_params(config, model),
            model,
            np.random.default_rng(0),
            grid_size=config.K,
            rho=config.rho,
        )
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self._emit(events.ExperimentStarted)

        failures: List[Tuple[int, BaseException]] = []
        loop = asyncio.get_event_loop()
        with self._executor() as executor:

            async def run_one(job: ReplicateJob) -> Tuple[ReplicateJob, ReplicateResult]:
                try:
                    return job, await loop.run_in_executor(executor, run_replicate, job)
                except Exception as e:
                    return job, e

            tasks = []
            for job in self._jobs(model):
                state = self.states[job.replicate] = ReplicateState(job.replicate)
                state.start()
                self._emit(events.ReplicateStarted, replicate=job.replicate, seed=job.seed)
                tasks.append(loop.create_task(run_one(job)))

            for completed in asyncio.as_completed(tasks):
                job, result = await completed
                if isinstance(result, BaseException):
                    failures.append((job.replicate, result))
                self._collect(job, result)

        records = [self.records[r] for r in sorted(self.records)]
        self._write_tables(records)

        if failures:
            _, first = min(failures, key=lambda failure: failure[0])
            self._emit(
                events.ExperimentFinished,
                replicates=len(records),
                exc_info=(type(first), first, first.__traceback__),
            )
            raise first
        self._emit(events.ExperimentFinished, replicates=len(records))
        return records

    def _collect(self, job: ReplicateJob, result: ReplicateResult) -> None:
        state = self.states[job.replicate]
        if isinstance(result, BaseException):
            state.fail()
            logger.debug("Failed: %r", result, replicate=job.replicate)
            self._emit(
                events.ReplicateFailed,
                replicate=job.replicate,
                seed=job.seed,
                exc_info=(type(result), result, result.__traceback__),
            )
            return

        self.records[job.replicate] = result
        if result.cap_hit:
            state.cap()
            self._emit(
                events.ReplicateCapped, replicate=job.replicate, seed=job.seed, record=result
            )
        else:
            state.finish()
            self._emit(
                events.ReplicateFinished, replicate=job.replicate, seed=job.seed, record=result
            )
        self._artifact_written(artifacts.write_record(self.output_dir, result))

    def _write_tables(self, records: List[RunRecord]) -> None:
        config_hash = self.config.config_hash
        out = self.output_dir
        self._artifact_written(
            artifacts.write_summary(out / artifacts.SUMMARY_FILE, config_hash, records)
        )
        self._artifact_written(
            artifacts.write_checkpoints(out / artifacts.CHECKPOINTS_FILE, config_hash, records)
        )
        self._artifact_written(
            artifacts.write_regret_curve(
                out / artifacts.REGRET_CURVE_FILE, config_hash, records, self.config.epsilon
            )
        )

    def _artifact_written(self, path: Path) -> None:
        self._emit(events.ArtifactWritten, path=str(path))


async def run_experiment(
    config: ExperimentConfig,
    *,
    workers: Optional[int] = None,
    event_consumer: Optional[Callable[[events.Event], None]] = None,
) -> List[RunRecord]:
    async with Experiment(config, workers=workers, event_consumer=event_consumer) as experiment:
        return await experiment.run()
