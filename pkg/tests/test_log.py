"""Unit tests for the `activerank.log` module."""
import logging
import sys

from activerank.log import (
    SummaryLogger,
    enable_default_logger,
    log_event,
    log_event_repr,
    log_summary,
    pluralize,
    str_capped,
)
from activerank.utils import get_logger
from tests.factories.events import (
    ExperimentFinishedFactory,
    ExperimentStartedFactory,
    ReplicateCappedFactory,
    ReplicateFailedFactory,
    ReplicateFinishedFactory,
)
from tests.factories.record import RunRecordFactory


def test_log_file_encoding(capsys, tmp_path):
    """Logging some fancy Unicode to the log file does not cause encoding errors."""
    log_file = tmp_path / "activerank.log"
    enable_default_logger(log_file=str(log_file))
    logger = logging.getLogger("activerank")
    try:
        logger.debug("ε-accurate ranking ✓ (η ≥ ½)")
    finally:
        for handler in list(logger.handlers):
            if isinstance(handler, logging.FileHandler):
                handler.close()
                logger.removeHandler(handler)

    assert "UnicodeEncodeError" not in capsys.readouterr().err
    assert "ε-accurate ranking ✓" in log_file.read_text(encoding="utf-8")


def test_log_event_emit_traceback():
    try:
        raise Exception("Hello!")
    except Exception:
        log_event(ExperimentFinishedFactory(exc_info=sys.exc_info()))


def test_log_event_repr_emit_traceback():
    try:
        raise Exception("Hello!")
    except Exception:
        log_event_repr(ReplicateFailedFactory(exc_info=sys.exc_info()))


def test_log_event_describes_records(caplog):
    caplog.set_level(logging.DEBUG, logger="activerank.events")
    event = ReplicateFinishedFactory(record=RunRecordFactory(tau=1234, terminal_regret=0.0625))
    log_event(event)
    message = caplog.records[-1].getMessage()
    assert message.startswith("Replicate finished")
    assert f"config_hash = {event.config_hash}" in message
    assert "tau = 1234, terminal_regret = 0.0625" in message


def test_get_logger_replicate(caplog):
    """Loggers created by `get_logger` include the replicate in messages."""
    caplog.set_level(logging.INFO, logger="activerank.test")
    logger = get_logger("activerank.test")
    logger.info("Hello!", replicate=17)
    logger.info("No replicate")
    assert [r.getMessage() for r in caplog.records] == ["[Replicate 17] Hello!", "No replicate"]


def test_get_logger_caches():
    assert get_logger("activerank.test") is get_logger("activerank.test")


def test_summary_logger(caplog):
    caplog.set_level(logging.DEBUG, logger="activerank.summary")
    wrapped = []
    log = log_summary(wrapped.append)

    started = ExperimentStartedFactory()
    config = started.experiment
    events = [
        started,
        ReplicateFinishedFactory(
            experiment=config, replicate=0, record=RunRecordFactory(tau=100, terminal_regret=0.1)
        ),
        ReplicateCappedFactory(
            experiment=config,
            replicate=1,
            record=RunRecordFactory(tau=3000, cap_hit=True, terminal_regret=0.7),
        ),
        ReplicateFailedFactory(
            experiment=config, replicate=2, exc_info=(ValueError, ValueError("boom"), None)
        ),
        ExperimentFinishedFactory(experiment=config, replicates=2),
    ]
    for event in events:
        log(event)

    assert wrapped == events
    messages = [r.getMessage() for r in caplog.records]
    started_message = f"Experiment {config.config_hash} started: klcrank on scenario two_cell"
    assert started_message + ", 2 replicates" in messages
    assert "[Replicate 0] Finished after 100 samples, terminal regret 0.1" in messages
    assert "[Replicate 1] Sample cap of 3000 reached, provisional regret 0.7" in messages
    assert "[Replicate 2] Failed, reason: boom" in messages
    assert "Collected 2 replicates, 1 hit the sample cap, 1 failed" in messages
    assert "Median stopping time: 1550 samples, median terminal regret: 0.4" in messages
    assert "Empirical failure rate (terminal regret > 0.5): 0.500 (delta = 0.1)" in messages
    assert any(m.startswith(SummaryLogger.EXPERIMENT_FINISHED_MESSAGE) for m in messages)


def test_summary_logger_reports_failed_experiments(caplog):
    caplog.set_level(logging.INFO, logger="activerank.summary")
    summary = SummaryLogger()
    event = ExperimentFinishedFactory(exc_info=(RuntimeError, RuntimeError("replicate 1"), None))
    summary.log(ExperimentStartedFactory(experiment=event.experiment))
    summary.log(event)
    assert "Experiment failed, reason: replicate 1" in [r.getMessage() for r in caplog.records]
    assert not summary.error_occurred


def test_pluralize_and_str_capped():
    assert pluralize(1, "replicate") == "1 replicate"
    assert pluralize(0, "replicate") == "0 replicates"
    assert str_capped("abcdef", 10) == "abcdef"
    assert str_capped("abcdefghijkl", 8) == "abcde..."
