"""Objects representing events in a Monte Carlo experiment.

Every time something important happens, an event is emitted. Emitted events are passed to
all event consumers registered via :func:`activerank.experiment.Experiment.add_event_consumer`.

Events should be consumed in a strict read-only mode: event objects are shared between all
consumers.

Events inheritance tree
-----------------------

Only leaf events are ever emitted, other events (named :class:`*Event`) are abstract classes.

::

    Event
        ExperimentEvent
            ExperimentStarted
            ExperimentFinished
            ArtifactWritten
            ReplicateEvent
                ReplicateStarted
                ReplicateFinished
                ReplicateCapped
                ReplicateFailed
        ExecutionInterrupted

Custom events
-------------

Applications may declare their own events in the same way::

    from activerank.events import ReplicateEvent
    import attr

    @attr.s(auto_attribs=True, repr=False)
    class ReplicatePlotted(ReplicateEvent):
        path: str
"""
import abc
from datetime import datetime
from types import TracebackType
from typing import TYPE_CHECKING, List, Optional, Tuple, Type, TypeVar

import attr

if TYPE_CHECKING:
    from activerank.experiment.config import ExperimentConfig
    from activerank.record import RunRecord


ExcInfo = Tuple[Type[BaseException], BaseException, Optional[TracebackType]]

EventType = TypeVar("EventType", bound="Event")


#   ABSTRACT EVENTS
@attr.s(frozen=True, repr=False)
class Event(abc.ABC):
    """An abstract base class for all types of events."""

    exc_info: Optional[ExcInfo] = attr.ib(default=None, kw_only=True)
    """Tuple containing exception info as returned by `sys.exc_info()`, if applicable."""

    timestamp: datetime = attr.ib(factory=datetime.now, init=False)
    """Event creation time"""

    def __str__(self) -> str:
        """Mimics Python's default `repr` format, without the `exc_info` and `timestamp` fields.

        If `exc_info` is not `None`, its underlying exception is included in the result string
        under the key `exception`.
        """
        fields: Tuple[attr.Attribute] = attr.fields(self.__class__)  # type: ignore
        field_reprs: List[str] = []

        for field in fields:
            field_value = getattr(self, field.name)

            if field.name == "exc_info":
                if field_value:
                    field_reprs.append(f"exception={repr(field_value[1])}")
            elif field.name == "timestamp":
                continue
            else:
                field_reprs.append(f"{field.name}={repr(field_value)}")

        return f"{self.__class__.__name__}({', '.join(field_reprs)})"

    def __repr__(self) -> str:
        return str(self)

    @property
    def exception(self) -> Optional[BaseException]:
        """Exception associated with this event or `None`"""
        if self.exc_info:
            return self.exc_info[1]
        return None


@attr.s(auto_attribs=True, repr=False)
class ExperimentEvent(Event, abc.ABC):
    experiment: "ExperimentConfig"

    @property
    def config_hash(self) -> str:
        return self.experiment.config_hash


@attr.s(auto_attribs=True, repr=False)
class ReplicateEvent(ExperimentEvent, abc.ABC):
    replicate: int
    seed: int


#   REAL EVENTS
class ExperimentStarted(ExperimentEvent):
    pass


@attr.s(auto_attribs=True, repr=False)
class ExperimentFinished(ExperimentEvent):
    """All replicates were collected and the artifacts written.

    `exc_info` is set when at least one replicate failed.
    """

    replicates: int = 0


@attr.s(auto_attribs=True, repr=False)
class ArtifactWritten(ExperimentEvent):
    path: str


class ReplicateStarted(ReplicateEvent):
    pass


@attr.s(auto_attribs=True, repr=False)
class ReplicateFinished(ReplicateEvent):
    """The active region emptied before the sample cap."""

    record: "RunRecord"

    @property
    def tau(self) -> int:
        return self.record.tau

    @property
    def terminal_regret(self) -> float:
        return self.record.terminal_regret


@attr.s(auto_attribs=True, repr=False)
class ReplicateCapped(ReplicateEvent):
    """The hard sample cap was hit; the record carries the provisional scoring."""

    record: "RunRecord"


class ReplicateFailed(ReplicateEvent):
    pass


class ExecutionInterrupted(Event):
    """The experiment was stopped by an unhandled exception"""
