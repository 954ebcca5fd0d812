import pytest

from activerank import events
from activerank.experiment import Experiment
from tests.factories.config import ExperimentConfigFactory
from tests.factories.record import RunRecordFactory


@pytest.mark.asyncio
async def test_emit_event():
    got_events_1 = []
    got_events_2 = []
    got_events_3 = []

    def event_consumer_1(event: events.Event) -> None:
        #   Event consumer passed to Experiment()
        got_events_1.append(event)

    def event_consumer_2(event: events.Event) -> None:
        #   Event consumer added before the experiment started
        got_events_2.append(event)

    def event_consumer_3(event: events.Event) -> None:
        #   Event consumer added to a running experiment
        got_events_3.append(event)

    config = ExperimentConfigFactory()
    experiment = Experiment(config, workers=1, event_consumer=event_consumer_1)
    experiment.add_event_consumer(event_consumer_2)
    async with experiment:
        experiment.add_event_consumer(event_consumer_3)
        emitted = [
            experiment.emit(events.ExperimentStarted, experiment=config),
            experiment.emit(events.ReplicateStarted, experiment=config, replicate=0, seed=1),
        ]

    assert got_events_1 == emitted
    assert got_events_2 == emitted
    assert got_events_3 == emitted


@pytest.mark.asyncio
async def test_emit_event_class():
    got_events_1 = []
    got_events_2 = []
    got_events_3 = []

    config = ExperimentConfigFactory()
    experiment = Experiment(config, workers=1)
    experiment.add_event_consumer(got_events_1.append, [events.ReplicateEvent])
    experiment.add_event_consumer(got_events_2.append, ["ArtifactWritten", "ReplicateCapped"])
    experiment.add_event_consumer(got_events_3.append)

    async with experiment:
        started = experiment.emit(events.ExperimentStarted, experiment=config)
        capped = experiment.emit(
            events.ReplicateCapped,
            experiment=config,
            replicate=0,
            seed=1,
            record=RunRecordFactory(cap_hit=True),
        )
        written = experiment.emit(events.ArtifactWritten, experiment=config, path="summary.csv")
        failed = experiment.emit(
            events.ReplicateFailed,
            experiment=config,
            replicate=1,
            seed=2,
            exc_info=(ValueError, ValueError(), None),
        )

    assert got_events_1 == [capped, failed]
    assert got_events_2 == [capped, written]
    assert got_events_3 == [started, capped, written, failed]


@pytest.mark.asyncio
async def test_interrupted_experiment_emits_execution_interrupted():
    got = []
    experiment = Experiment(ExperimentConfigFactory(), workers=1, event_consumer=got.append)
    with pytest.raises(RuntimeError):
        async with experiment:
            raise RuntimeError("stop")
    assert len(got) == 1
    assert isinstance(got[0], events.ExecutionInterrupted)
    assert str(got[0].exception) == "stop"


def test_incorrect_event_class_str():
    experiment = Experiment(ExperimentConfigFactory(), workers=1)
    with pytest.raises(ValueError):
        experiment.add_event_consumer(lambda event: event, ["NoSuchEvent"])
    with pytest.raises(ValueError):
        experiment.add_event_consumer(lambda event: event, ["ExcInfo"])
