"""Parallel execution."""

from .worker_pool import WorkerPool, pool_map

__all__ = ["WorkerPool", "pool_map"]
