"""Utility functions and classes used across `activerank`."""
import asyncio
from datetime import datetime, timezone, tzinfo
import functools
import logging
from typing import AsyncContextManager, Callable, Optional


logger = logging.getLogger(__name__)


class AsyncWrapper(AsyncContextManager):
    """Runs the calls of a synchronous callable, one at a time, in a worker task.

    Example usage:

      async with AsyncWrapper(consumer) as wrapper:
          wrapper.async_call(event)

    Calls are delivered in submission order and their results are discarded. An exception
    raised by a call is logged; `KeyboardInterrupt` is re-raised in the event loop.
    """

    def __init__(self, wrapped: Callable):
        self._wrapped = wrapped
        self._pending: "asyncio.Queue[functools.partial]" = asyncio.Queue()
        self._loop = asyncio.get_event_loop()
        self._worker_task: Optional[asyncio.Task] = None

    async def __aenter__(self) -> "AsyncWrapper":
        self.start()
        return self

    async def __aexit__(self, *exc_info) -> None:
        await self.stop()

    @property
    def closed(self) -> bool:
        return self._worker_task is None

    def start(self) -> None:
        if self.closed:
            self._worker_task = self._loop.create_task(self._deliver_all())

    async def stop(self) -> None:
        """Deliver the calls queued so far; calls made afterwards raise `RuntimeError`."""
        task, self._worker_task = self._worker_task, None
        if task is None:
            return
        await self._pending.join()
        task.cancel()
        await asyncio.gather(task, return_exceptions=True)

    def async_call(self, *args, **kwargs) -> None:
        if self.closed:
            raise RuntimeError("AsyncWrapper is closed")
        self._pending.put_nowait(functools.partial(self._wrapped, *args, **kwargs))

    async def _deliver_all(self) -> None:
        while True:
            try:
                call = await self._pending.get()
            except asyncio.CancelledError:
                logger.debug("AsyncWrapper's worker task cancelled")
                return
            try:
                self._deliver(call)
            finally:
                self._pending.task_done()
            await asyncio.sleep(0)

    def _deliver(self, call: functools.partial) -> None:
        try:
            call()
        except KeyboardInterrupt as e:
            logger.debug("KeyboardInterrupt in a wrapped call, passing it to the event loop")
            self._loop.call_soon(_reraise, e)
        except Exception:
            logger.exception("Unhandled exception in wrapped callable")


def _reraise(e: BaseException) -> None:
    raise e


def get_local_timezone() -> Optional[tzinfo]:
    return datetime.now(timezone.utc).astimezone().tzinfo


class _AddReplicate(logging.LoggerAdapter):
    """A LoggerAdapter that adds the value of the `replicate` keyword param to logged messages."""

    def __init__(self, logger, fmt):
        super().__init__(logger, extra={})
        self.format = fmt

    def process(self, msg, kwargs):
        replicate = kwargs.pop("replicate", None)
        if replicate is not None:
            msg = self.format.format(replicate=replicate, msg=msg)
        return msg, kwargs


@functools.lru_cache(None)
def get_logger(name: str, fmt="[Replicate {replicate}] {msg}"):
    """Get named logger instance.

    The returned loggers accept a `replicate` keyword argument and include it in the
    formatted message.
    """
    return _AddReplicate(logging.getLogger(name), fmt=fmt)
