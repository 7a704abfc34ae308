"""
Ordered worker pool for λ / z / t sweeps.

Results always come back in input order, so downstream reductions do not
depend on scheduling.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional

try:
    from tqdm.auto import tqdm
    HAS_TQDM = True
except ImportError:
    HAS_TQDM = False


def parallel_map(
    fn: Callable,
    items: Iterable,
    threads: int = 1,
    desc: Optional[str] = None,
    quiet: bool = True,
) -> List:
    """
    Apply fn to every item, in order.

    Args:
        fn: Pure function of one item.
        items: Inputs.
        threads: Pool size; 1 runs inline.
        desc: Progress-bar label.
        quiet: Suppress the progress bar.

    Returns:
        List of fn(item) in input order.
    """
    items = list(items)
    show = HAS_TQDM and not quiet and len(items) > 1

    if threads <= 1:
        if show:
            return [fn(item) for item in tqdm(items, desc=desc)]
        return [fn(item) for item in items]

    with ThreadPoolExecutor(max_workers=threads) as pool:
        results = pool.map(fn, items)
        if show:
            results = tqdm(results, total=len(items), desc=desc)
        return list(results)


def ordered_mapper(threads: int = 1, desc: Optional[str] = None, quiet: bool = True):
    """map-like callable for quadrature.gauss_legendre(mapper=...)."""

    def mapper(fn, items):
        return parallel_map(fn, items, threads=threads, desc=desc, quiet=quiet)

    return mapper
