import logging
import os
from concurrent.futures import ThreadPoolExecutor
from types import TracebackType
from typing import Callable, Iterable, Self

from ppcurve.errors import DomainError

logger = logging.getLogger(__name__)

THREADS_ENV_VAR = "PPCURVE_THREADS"


def resolve_threads(threads: int | None = None) -> int:
    """``threads`` if given, else ``PPCURVE_THREADS``, else 1."""
    if threads is None:
        raw = os.environ.get(THREADS_ENV_VAR)
        if not raw:
            return 1
        try:
            threads = int(raw)
        except ValueError:
            raise DomainError(f"{THREADS_ENV_VAR} must be a positive integer, got {raw!r}")

    if threads < 1:
        raise DomainError(f"Thread count must be positive, got {threads}")

    return threads


class ReplicatePool:
    """Ordered map over replicate indices.

    Results always come back in input order, so reductions over them are identical
    for any worker count.
    """

    def __init__(self, threads: int = 1) -> None:
        self.threads = threads
        self._executor: ThreadPoolExecutor | None = None

    @classmethod
    def create(cls, threads: int | None = None) -> Self:
        return cls(threads=resolve_threads(threads))

    def __repr__(self) -> str:
        return f"<ReplicatePool (threads={self.threads})>"

    def __enter__(self) -> Self:
        logger.debug("Starting %r", self)
        if self.threads > 1:
            self._executor = ThreadPoolExecutor(max_workers=self.threads, thread_name_prefix="ppcurve")
        return self

    def __exit__(
        self,
        exc_type: type[BaseException] | None,
        exc: BaseException | None,
        traceback: TracebackType | None,
    ) -> None:
        if self._executor is not None:
            self._executor.shutdown(wait=True, cancel_futures=exc is not None)
            self._executor = None

    def map[T, R](self, func: Callable[[T], R], items: Iterable[T]) -> list[R]:
        if self._executor is None:
            return [func(it) for it in items]
        return list(self._executor.map(func, items))
