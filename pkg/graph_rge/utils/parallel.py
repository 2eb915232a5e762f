# utils/parallel.py
"""Order-preserving parallel map over independent jobs."""

import logging
from typing import Callable, Iterable, TypeVar

from joblib import Parallel, delayed

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(func: Callable[..., R], items: Iterable[T], threads: int = 1, *args) -> list[R]:
    """Apply func(item, *args) to every item; results keep the input order.

    Results never depend on `threads`: each job must derive its randomness
    from its own inputs.
    """
    items = list(items)
    if threads <= 1 or len(items) < 2:
        return [func(item, *args) for item in items]
    logger.debug(f"Dispatching {len(items)} jobs on {threads} workers")
    return Parallel(n_jobs=threads)(delayed(func)(item, *args) for item in items)


def chunked(items: list[T], chunks: int) -> list[list[T]]:
    """Split items into at most `chunks` contiguous, near-equal slices."""
    chunks = max(1, min(chunks, len(items)))
    size, extra = divmod(len(items), chunks)
    out, start = [], 0
    for k in range(chunks):
        stop = start + size + (1 if k < extra else 0)
        out.append(items[start:stop])
        start = stop
    return out
