"""Optional thread parallelism, capped by ``ALMOSTREP_THREADS``.

Results always come back in input order, so reductions stay deterministic.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
U = TypeVar("U")


def max_threads() -> int:
    raw = os.environ.get("ALMOSTREP_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, n)


def pmap(fn: Callable[[T], U], items: Iterable[T], min_items: int = 64) -> list[U]:
    items = list(items)
    n = max_threads()
    if n == 1 or len(items) < min_items:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))
