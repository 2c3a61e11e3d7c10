"""Deterministic chunked execution.

Work is always cut into the same fixed-size chunks, whatever the thread
count, and results are combined in chunk order.  Kernels release the GIL, so
a plain thread pool gives real concurrency.
"""
import math
import os
from concurrent.futures import ThreadPoolExecutor

CHUNK = 4096


def default_threads():
    try:
        return max(1, int(os.environ.get("HARDYZ_THREADS", "1")))
    except ValueError:
        return 1


def chunk_slices(n, size=CHUNK):
    return [slice(i, min(i + size, n)) for i in range(0, n, size)]


def map_ordered(fn, items, threads=None):
    """``list(map(fn, items))`` on a pool; output order equals input order."""
    items = list(items)
    threads = default_threads() if threads is None else threads
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def exact_sum(values):
    """Correctly rounded sum; independent of chunking and thread count."""
    return math.fsum(values)
