import os
from concurrent.futures import ThreadPoolExecutor


def worker_count():
    """Thread cap from ``MIXPROD_THREADS`` (0 or unset means one per CPU)."""
    raw = os.environ.get("MIXPROD_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n <= 0:
        n = os.cpu_count() or 1
    return n


def ordered_map(fn, items):
    """``list(map(fn, items))``, threaded when more than one worker is allowed.

    Results come back in input order, so callers see the same output for any
    thread count.
    """
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
