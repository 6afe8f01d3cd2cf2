"""Ordered parallel maps."""

from __future__ import annotations

import threading

import pytest

from pt_double_well.tasks.worker_pool import WorkerPool, pool_map


def test_results_keep_input_order():
    with WorkerPool(4) as pool:
        assert pool.map(lambda k: k * k, range(20)) == [k * k for k in range(20)]


def test_single_worker_runs_inline():
    with WorkerPool(1) as pool:
        names = pool.map(lambda _: threading.current_thread().name, range(3))
    assert set(names) == {threading.current_thread().name}


def test_nested_maps_do_not_block():
    with WorkerPool(2) as pool:
        result = pool.map(lambda k: sum(pool.map(lambda j: j + k, range(3))), range(4))
    assert result == [3 + 3 * k for k in range(4)]


def test_exceptions_propagate():
    def fail(k: int) -> int:
        if k == 2:
            raise ValueError("boom")
        return k

    with WorkerPool(2) as pool, pytest.raises(ValueError, match="boom"):
        pool.map(fail, range(4))


def test_pool_map_without_pool():
    assert pool_map(None, str, [1, 2]) == ["1", "2"]
