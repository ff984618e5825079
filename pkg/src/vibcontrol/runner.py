"""Ordered, worker-count-independent execution of scan rows.

Rows are pure functions of their arguments, each row is computed by exactly
the same code path whether it runs in-process or in a pool, and results come
back in submission order, so output files are byte-identical for any worker
count.
"""

import os
from concurrent.futures import ProcessPoolExecutor

VIBCONTROL_WORKERS = "VIBCONTROL_WORKERS"


def default_workers() -> int:
    env = os.environ.get(VIBCONTROL_WORKERS, "")
    if env.strip():
        try:
            n = int(env)
        except ValueError as exc:
            raise ValueError(f"{VIBCONTROL_WORKERS} must be an integer, got {env!r}") from exc
        if n < 1:
            raise ValueError(f"{VIBCONTROL_WORKERS} must be >= 1, got {n}")
        return n
    return max(os.cpu_count() or 1, 1)


def _call(packed):
    fn, args = packed
    return fn(*args)


def map_ordered(fn, argument_tuples, workers: int = 1):
    """Apply fn(*args) to every tuple, preserving order."""
    items = [(fn, args) for args in argument_tuples]
    if workers <= 1 or len(items) <= 1:
        return [_call(item) for item in items]
    chunk = max(1, len(items) // (8 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_call, items, chunksize=chunk))
