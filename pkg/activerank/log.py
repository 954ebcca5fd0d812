"""Utilities for logging experiment events via the standard `logging` module.

Functions in this module fall into two categories:

* Functions that convert experiment events to calls to the standard Python `logging`
  module, using loggers in the "activerank" namespace. These are meant to be passed to
  :func:`activerank.experiment.Experiment.add_event_consumer`.

* :func:`enable_default_logger`, which configures logging to stderr with level `INFO` and,
  optionally, to a given file with level `DEBUG`.

For detailed, human-readable output use `log_event`::

    experiment.add_event_consumer(activerank.log.log_event)

For summarized output use `log_summary()`, optionally wrapping a detailed logger::

    experiment.add_event_consumer(activerank.log.log_summary(activerank.log.log_event_repr))
"""
from collections import defaultdict
from datetime import datetime
import inspect
import logging
import os
import sys
import time
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from activerank import __version__ as activerank_version
from activerank import events
from activerank.utils import get_local_timezone, get_logger


event_logger = logging.getLogger("activerank.events")

# Initializing loggers, so that logger.setLevel() in enable_default_logger will work.
_ranking_logger = logging.getLogger("activerank.ranking")


class _IsoMillisFormatter(logging.Formatter):
    """Log Formatter with ISO-8601 timestamps in local time, with milliseconds."""

    LOCAL_TZ = get_local_timezone()

    def formatTime(self, record: logging.LogRecord, datefmt=None):
        """Format datetime; example: `2021-06-11T14:55:43.156+0200`."""
        dt = datetime.fromtimestamp(record.created, tz=self.LOCAL_TZ)
        millis = f"{(dt.microsecond // 1000):03d}"
        return dt.strftime(f"%Y-%m-%dT%H:%M:%S.{millis}%z")


def enable_default_logger(
    format_: str = "[%(asctime)s %(levelname)s %(name)s] %(message)s",
    log_file: Optional[str] = None,
    debug_ranking: bool = False,
):
    """Enable the default logger that logs messages to stderr with level `INFO`.

    If `log_file` is specified, the logger will output messages with level `DEBUG` to
    the given file. Per-iteration elimination and refinement messages of the ranking
    algorithms are only passed on when `debug_ranking` is set.
    """
    logger = logging.getLogger("activerank")
    logger.setLevel(logging.DEBUG)
    logger.disabled = False

    formatter = _IsoMillisFormatter(fmt=format_)
    console_handler = logging.StreamHandler()
    console_handler.setFormatter(formatter)
    console_handler.setLevel(logging.INFO)
    logger.addHandler(console_handler)

    _ranking_logger.setLevel(logging.DEBUG if debug_ranking else logging.INFO)

    if log_file:
        file_handler = logging.FileHandler(filename=log_file, mode="w", encoding="utf-8")
        file_handler.setFormatter(formatter)
        file_handler.setLevel(logging.DEBUG)
        logger.addHandler(file_handler)

        logger.debug(
            "activerank version: %s, script: %s, working directory: %s",
            activerank_version,
            sys.argv[0],
            os.getcwd(),
        )
        logger.info(
            "Using log file `%s`; in case of errors look for additional information there", log_file
        )


# Default human-readable representation of event types.
event_type_to_string = {
    events.ExperimentStarted: "Experiment started",
    events.ExperimentFinished: "Experiment finished",
    events.ArtifactWritten: "Artifact written",
    events.ReplicateStarted: "Replicate started",
    events.ReplicateFinished: "Replicate finished",
    events.ReplicateCapped: "Replicate stopped at the sample cap",
    events.ReplicateFailed: "Replicate failed",
    events.ExecutionInterrupted: "Execution interrupted",
}


def _check_event_type_to_string():
    # This is to check that `event_type_to_string` covers all event types

    event_types = set(
        member
        for member in events.__dict__.values()
        if inspect.isclass(member) and issubclass(member, events.Event)
    )

    # only the leaf event classes are ever emitted
    concrete_event_types = {ev for ev in event_types if not ev.__subclasses__()}

    assert len(concrete_event_types) > 0  # Sanity check

    assert concrete_event_types.issubset(
        event_type_to_string.keys()
    ), concrete_event_types.difference(event_type_to_string.keys())


_check_event_type_to_string()


def _describe(name: str, value: Any) -> str:
    if name == "experiment":
        return f"config_hash = {value.config_hash}"
    if name == "record":
        return f"tau = {value.tau}, terminal_regret = {value.terminal_regret:.4g}"
    return f"{name} = {str_capped(value, 200)}"


def log_event(event: events.Event) -> None:
    """Log `event` with a human-readable description."""

    loglevel = logging.DEBUG

    if not event_logger.isEnabledFor(loglevel):
        return

    #   Default value because we allow developers to declare their own events
    descr = event_type_to_string.get(type(event), str(type(event)))
    fields = (
        _describe(name, value)
        for name, value in event.__dict__.items()
        if name not in ("exc_info", "timestamp")
    )
    msg = "; ".join([descr, *fields])

    if event.exc_info:
        event_logger.log(loglevel, msg, exc_info=event.exc_info)
    else:
        event_logger.log(loglevel, msg)


def log_event_repr(event: events.Event) -> None:
    """Log the result of calling `repr(event)`."""

    if event.exc_info:
        event_logger.debug("%r", event, exc_info=event.exc_info)
    else:
        event_logger.debug("%r", event)


class SummaryLogger:
    """Aggregates replicate events into a high-level summary of each experiment.

    The logger's :func:`log()` method can be used as an event consumer. The optional
    `wrapped_emitter` is called with every event before it is aggregated, so a detailed
    logger can be chained with the summary::

        summary_logger = SummaryLogger(wrapped_emitter=log_event_repr).log
        experiment.add_event_consumer(summary_logger)
    """

    EXPERIMENT_FINISHED_MESSAGE = "Experiment finished"

    logger = get_logger("activerank.summary")

    # Start time of each experiment, indexed by config hash
    start_time: Dict[str, float]

    # Stopping times and terminal regrets of the collected replicates, by config hash
    taus: Dict[str, List[int]]
    regrets: Dict[str, List[float]]

    # Replicates that hit the sample cap, and replicates that failed
    cap_hits: Dict[str, int]
    failures: Dict[str, int]

    def __init__(self, wrapped_emitter: Optional[Callable[[events.Event], None]] = None):
        self._wrapped_emitter = wrapped_emitter
        self.error_occurred = False
        self._reset_counters()

    def _reset_counters(self):
        self.start_time = {}
        self.taus = defaultdict(list)
        self.regrets = defaultdict(list)
        self.cap_hits = defaultdict(int)
        self.failures = defaultdict(int)

    def log(self, event: events.Event) -> None:
        """Register an event."""

        if self._wrapped_emitter:
            self._wrapped_emitter(event)

        if self.error_occurred:
            return

        try:
            self._handle(event)
        except Exception:
            self.logger.exception("SummaryLogger entered invalid state")
            self.error_occurred = True

    def _register_result(self, event: "events.ReplicateEvent", record) -> None:
        key = event.config_hash
        self.taus[key].append(record.tau)
        self.regrets[key].append(record.terminal_regret)

    def _print_summary(self, event: events.ExperimentFinished) -> None:
        key = event.config_hash
        epsilon = event.experiment.epsilon
        taus, regrets = self.taus[key], self.regrets[key]
        self.logger.info(
            "Collected %s, %s hit the sample cap, %s failed",
            pluralize(len(taus), "replicate"),
            self.cap_hits[key],
            self.failures[key],
        )
        if taus:
            failure_rate = float(np.mean(np.asarray(regrets) > epsilon))
            self.logger.info(
                "Median stopping time: %d samples, median terminal regret: %.4g",
                int(np.median(taus)),
                float(np.median(regrets)),
            )
            self.logger.info(
                "Empirical failure rate (terminal regret > %g): %.3f (delta = %g)",
                epsilon,
                failure_rate,
                event.experiment.delta,
            )

    def _handle(self, event: events.Event):
        if isinstance(event, events.ExperimentStarted):
            self.start_time[event.config_hash] = time.time()
            config = event.experiment
            self.logger.info(
                "Experiment %s started: %s on scenario %s, %s",
                event.config_hash,
                config.algorithm,
                config.scenario,
                pluralize(config.replicates, "replicate"),
            )

        elif isinstance(event, events.ReplicateStarted):
            self.logger.debug("Started with seed %d", event.seed, replicate=event.replicate)

        elif isinstance(event, events.ReplicateFinished):
            self._register_result(event, event.record)
            self.logger.info(
                "Finished after %d samples, terminal regret %.4g",
                event.record.tau,
                event.record.terminal_regret,
                replicate=event.replicate,
            )

        elif isinstance(event, events.ReplicateCapped):
            self._register_result(event, event.record)
            self.cap_hits[event.config_hash] += 1
            self.logger.warning(
                "Sample cap of %d reached, provisional regret %.4g",
                event.record.tau,
                event.record.terminal_regret,
                replicate=event.replicate,
            )

        elif isinstance(event, events.ReplicateFailed):
            self.failures[event.config_hash] += 1
            exc = event.exception
            reason = str(exc) or repr(exc) or "unexpected error"
            self.logger.error("Failed, reason: %s", reason, replicate=event.replicate)

        elif isinstance(event, events.ArtifactWritten):
            self.logger.debug("Wrote %s", event.path)

        elif isinstance(event, events.ExperimentFinished):
            key = event.config_hash
            total_time = time.time() - self.start_time.get(key, time.time())
            self._print_summary(event)
            if not event.exc_info:
                self.logger.info(f"{self.EXPERIMENT_FINISHED_MESSAGE} in {total_time:.1f}s")
            else:
                reason = str(event.exception) or repr(event.exception) or "unexpected error"
                self.logger.error("Experiment failed, reason: %s", reason)

        elif isinstance(event, events.ExecutionInterrupted):
            assert event.exc_info
            exc_type = event.exc_info[0]
            self.logger.warning(f"Execution interrupted by {exc_type.__name__}")


def log_summary(wrapped_emitter: Optional[Callable[[events.Event], None]] = None):
    """Output a summary of each experiment.

    Creates a :class:`SummaryLogger` wrapping an optional `wrapped_emitter` and returns its
    :func:`~SummaryLogger.log` method.
    """
    summary_logger = SummaryLogger(wrapped_emitter)
    return summary_logger.log


def pluralize(num: int, thing: str) -> str:
    """Return the string f"1 {thing}" or f"{num} {thing}s", depending on `num`."""
    return f"1 {thing}" if num == 1 else f"{num} {thing}s"


def str_capped(object: Any, max_len: int) -> str:
    """Return the string representation of `object` trimmed to `max_len`.

    Trailing ellipsis is added to the returned string if the original had to be trimmed.
    """
    s = str(object)
    if len(s) <= max_len:
        return s
    return s[: max_len - 3] + "..." if max_len >= 3 else "..."
