"""Ordered worker-pool map used by the exhaustive searches."""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from src.backend.config_loader import CONFIG

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(fn: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> List[R]:
    """Apply fn to every item; results come back in input order whatever the worker count."""
    items = list(items)
    workers = CONFIG["threads"] if threads is None else threads
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    logger.debug(f"mapping {len(items)} items over {workers} threads")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def first_match(fn: Callable[[T], Optional[R]], items: Iterable[T], threads: Optional[int] = None, chunk: int = 256) -> Optional[R]:
    """First non-None result in input order; workers process one chunk at a time."""
    batch: List[T] = []
    for item in items:
        batch.append(item)
        if len(batch) >= chunk:
            hit = next((r for r in ordered_map(fn, batch, threads) if r is not None), None)
            if hit is not None:
                return hit
            batch = []
    if batch:
        return next((r for r in ordered_map(fn, batch, threads) if r is not None), None)
    return None
