"""Order-preserving thread pool map."""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(
    fn: Callable[[T], R],
    items: Iterable[T],
    threads: Optional[int] = None,
) -> List[R]:
    """
    Apply fn to every item, returning results in input order.

    Args:
        fn: Pure function of one item.
        items: Work items.
        threads: Worker cap; 1 runs inline, None uses the executor default.

    Returns:
        List of results, same order as items.
    """
    work = list(items)
    if threads == 1 or len(work) <= 1:
        return [fn(item) for item in work]

    logger.debug(f"Dispatching {len(work)} items to {threads or 'default'} workers")
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, work))


def chunked(n: int, size: int) -> List[slice]:
    """Split range(n) into contiguous slices of at most size elements."""
    size = max(1, size)
    return [slice(start, min(n, start + size)) for start in range(0, n, size)]
