"""Worker pool shared by the parallel maps of the numerical modules.

The CLI owns one pool per run; library functions take an optional pool and
fall back to sequential evaluation. Results always come back in input order.
"""

from __future__ import annotations

import logging
import threading
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

from pt_double_well.core.settings import get_settings

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class WorkerPool:
    """Ordered parallel map over independent jobs.

    Threads are enough: the heavy kernels (scipy integrators, LAPACK) spend
    most of their time outside the interpreter lock.
    """

    def __init__(self, workers: int | None = None) -> None:
        """Initialize the pool.

        Args:
            workers: Pool size; defaults to the configured worker count
        """
        self.workers = max(1, workers or get_settings().workers)
        self._executor: ThreadPoolExecutor | None = None

    def __enter__(self) -> WorkerPool:
        if self.workers > 1:
            self._executor = ThreadPoolExecutor(
                max_workers=self.workers, thread_name_prefix="ptdw"
            )
            logger.debug("Started worker pool with %d threads", self.workers)
        return self

    def __exit__(self, *exc: object) -> None:
        self.shutdown()

    def shutdown(self) -> None:
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None

    def map(self, func: Callable[[T], R], items: Iterable[T]) -> list[R]:
        """Apply ``func`` to every item; exceptions propagate to the caller."""
        jobs = list(items)
        # Nested maps issued from pool threads run inline.
        inside = threading.current_thread().name.startswith("ptdw")
        if self._executor is None or len(jobs) <= 1 or inside:
            return [func(job) for job in jobs]
        return list(self._executor.map(func, jobs))


def pool_map(pool: WorkerPool | None, func: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """Map through ``pool`` when given, sequentially otherwise."""
    if pool is None:
        return [func(item) for item in items]
    return pool.map(func, items)
