"""Bounded worker pool for per-bin work.

Worker count is capped by the ``MULTIMAPPER_THREADS`` environment variable;
unset or ``0`` means "use the machine". Results always come back in input
order, so callers stay deterministic regardless of the cap.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")

ENV_THREADS = "MULTIMAPPER_THREADS"


def worker_count() -> int:
    raw = os.environ.get(ENV_THREADS, "").strip()
    if raw:
        try:
            requested = int(raw)
        except ValueError:
            requested = 1
        if requested > 0:
            return requested
        if requested < 0:
            return 1
    return os.cpu_count() or 1


def parallel_map(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """Apply ``fn`` to every item, preserving order."""
    seq: Sequence[T] = list(items)
    workers = min(worker_count(), len(seq))
    if workers <= 1 or len(seq) < 2:
        return [fn(x) for x in seq]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, seq))
