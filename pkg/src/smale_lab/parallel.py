"""Order-preserving thread map; results never depend on the worker count."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Optional, TypeVar

T = TypeVar("T")
R = TypeVar("R")

ENV_THREADS = "SMALE_LAB_THREADS"


def worker_count(requested: Optional[int] = None) -> int:
    if requested is not None:
        return max(1, int(requested))
    env = os.environ.get(ENV_THREADS)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def ordered_map(fn: Callable[[T], R], items: Iterable[T], workers: Optional[int] = None) -> list[R]:
    items = list(items)
    n = worker_count(workers)
    if n == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def chunked(seq, parts: int) -> list:
    parts = max(1, min(parts, len(seq)))
    step = -(-len(seq) // parts)
    return [seq[i : i + step] for i in range(0, len(seq), step)]
