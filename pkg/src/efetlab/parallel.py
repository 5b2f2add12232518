"""Order-preserving parallel map capped by ``EFETLAB_THREADS``."""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor


def worker_count(requested: int | None = None) -> int:
    """Resolve the worker cap: explicit value, else EFETLAB_THREADS, 0 meaning auto."""
    if requested is None:
        raw = os.environ.get("EFETLAB_THREADS", "0")
        try:
            requested = int(raw)
        except ValueError:
            requested = 0
    if requested <= 0:
        requested = os.cpu_count() or 1
    return max(1, requested)


def parallel_map(fn, items, workers: int | None = None) -> list:
    """``[fn(x) for x in items]``, possibly across processes, results in input order.

    ``fn`` and its results must be picklable when more than one worker is used.
    """
    items = list(items)
    n = min(worker_count(workers), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
