"""Order-preserving parallel map gated by the ITE_THREADS environment variable.

Work items fan out to a process pool only when ITE_THREADS > 1; output order
(and therefore every downstream artifact) is identical for any worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor


def worker_count() -> int:
    try:
        n = int(os.environ.get("ITE_THREADS", "1"))
    except ValueError:
        return 1
    return max(1, n)


def parallel_map(fn, items, workers: int | None = None) -> list:
    items = list(items)
    n = worker_count() if workers is None else max(1, workers)
    if n <= 1 or len(items) < 4:
        return [fn(x) for x in items]
    chunk = max(1, len(items) // (4 * n))
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items, chunksize=chunk))
