"""Delivery of experiment events to asynchronous consumers."""
import asyncio
from typing import Callable, Dict, Iterable, Set, Type, Union

from activerank import events
from activerank.utils import AsyncWrapper

EventConsumer = Callable[[events.Event], None]
EventClassOrName = Union[Type[events.Event], str]


class AsyncEventDispatcher:
    """Passes every emitted event to the consumers subscribed to one of its classes.

    Each consumer runs in its own :class:`~activerank.utils.AsyncWrapper`, so consumers see
    events in emission order and a slow consumer never blocks the emitter.
    """

    def __init__(self):
        self._consumers: Dict[AsyncWrapper, Set[Type[events.Event]]] = {}
        self._running = False

    @property
    def running(self) -> bool:
        return self._running

    def add_event_consumer(
        self,
        event_consumer: EventConsumer,
        event_classes_or_names: Iterable[EventClassOrName] = (events.Event,),
    ) -> None:
        """Subscribe `event_consumer` to the given event classes (or their names).

        Consumers added while the dispatcher is running start immediately.
        """
        event_classes = {parse_event_class(x) for x in event_classes_or_names}
        consumer = AsyncWrapper(event_consumer)
        if self._running:
            consumer.start()
        self._consumers[consumer] = event_classes

    def emit(self, event: events.Event) -> None:
        for consumer, event_classes in self._consumers.items():
            if isinstance(event, tuple(event_classes)):
                consumer.async_call(event)

    def start(self) -> None:
        self._running = True
        for consumer in self._consumers:
            consumer.start()

    async def stop(self) -> None:
        """Wait until all consumers processed the events emitted so far, then stop them."""
        self._running = False
        if self._consumers:
            await asyncio.gather(*(consumer.stop() for consumer in self._consumers))


def parse_event_class(event_cls_or_name: EventClassOrName) -> Type[events.Event]:
    """Resolve an event class given either directly or by its name in `activerank.events`."""
    if isinstance(event_cls_or_name, type):
        return event_cls_or_name
    event_cls = getattr(events, event_cls_or_name, None)
    if not (isinstance(event_cls, type) and issubclass(event_cls, events.Event)):
        raise ValueError(
            "Event classes must be given either as classes or as names of classes defined "
            f"in `activerank.events`, got {event_cls_or_name!r}"
        )
    return event_cls
