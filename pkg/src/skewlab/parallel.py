"""Thread-cap plumbing honoring the SKEWLAB_THREADS environment variable."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

from .errors import ConfigError


def worker_count(default_cap: int = 8) -> int:
    raw = os.environ.get("SKEWLAB_THREADS")
    if raw is None:
        return min(default_cap, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n < 1:
        raise ConfigError(f"SKEWLAB_THREADS must be a positive integer, got {raw!r}")
    return n


def map_ordered(fn, items, workers: int | None = None) -> list:
    """Apply fn over items, results in input order regardless of scheduling."""
    items = list(items)
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
