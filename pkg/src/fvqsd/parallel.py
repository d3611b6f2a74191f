"""Replica fan-out with deterministic merge order.

Results come back indexed by replica, never by completion order, so the
thread count cannot change any downstream reduction.  Worker functions are
expected to spend their time in nogil kernels; with the JIT disabled they
still run correctly, just without parallel speedup.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, TypeVar

T = TypeVar("T")

__all__ = ["map_replicas", "default_threads"]


def default_threads() -> int:
    return os.cpu_count() or 1


def map_replicas(fn: Callable[[int], T], replicas: int, threads: int = 1) -> list[T]:
    """Evaluate fn(0..replicas-1), possibly in parallel, in index order."""
    if replicas < 0:
        raise ValueError("replicas must be nonnegative")
    if threads <= 1 or replicas <= 1:
        return [fn(r) for r in range(replicas)]
    chunk = max(1, replicas // (threads * 8))
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(replicas), chunksize=chunk))
