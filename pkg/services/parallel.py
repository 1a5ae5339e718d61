"""
Ordered parallel map for sweep grid points.

Each grid point is independent pure work; results come back in input order
so CSV output does not depend on scheduling.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from settings import get_thread_count

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(func: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> List[R]:
    """
    Apply func to every item, in parallel up to `threads` workers
    (LAMHOM_THREADS when not given), preserving order.

    Args:
        func: pure function of one item
        items: inputs
        threads: worker cap; 1 runs inline

    Returns:
        List of results in the order of `items`
    """
    work = list(items)
    workers = min(threads or get_thread_count(), max(len(work), 1))
    if workers <= 1:
        return [func(item) for item in work]
    logger.debug("mapping %d items over %d threads", len(work), workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, work))
