"""Order-preserving worker pool used by the engine."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def resolve_threads(n_threads: int) -> int:
    """0 means one worker per CPU."""
    if n_threads < 0:
        raise ValueError(f"n_threads must be >= 0, got {n_threads}")
    return n_threads or (os.cpu_count() or 1)


def ordered_map(fn: Callable[[T], R], items: Iterable[T], n_threads: int = 1) -> list[R]:
    """map() over a thread pool; results come back in input order."""
    items = list(items)
    workers = min(resolve_threads(n_threads), len(items))
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
