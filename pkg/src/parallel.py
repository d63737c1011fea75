"""
Deterministic chunked reductions.

Work is split into fixed-size chunks of leading indices; chunks may run on any
number of worker threads, and partial results are always merged in chunk order,
so floating-point sums do not depend on the worker count.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, Tuple, TypeVar

import numpy as np

from .config import DEFAULT_THREADS, PAIR_CHUNK_SIZE

logger = logging.getLogger(__name__)

T = TypeVar("T")


def chunk_bounds(n_items: int, chunk_size: Optional[int] = None) -> List[Tuple[int, int]]:
    chunk_size = chunk_size or PAIR_CHUNK_SIZE
    if chunk_size < 1:
        raise ValueError(f"Chunk size must be positive, got {chunk_size}")
    return [(lo, min(lo + chunk_size, n_items)) for lo in range(0, n_items, chunk_size)]


def chunked_map(
    func: Callable[[int, int], T],
    n_items: int,
    threads: Optional[int] = None,
    chunk_size: Optional[int] = None,
) -> List[T]:
    """Apply func(lo, hi) to every chunk; results come back in chunk order"""
    bounds = chunk_bounds(n_items, chunk_size)
    threads = threads or DEFAULT_THREADS
    if threads <= 1 or len(bounds) <= 1:
        return [func(lo, hi) for lo, hi in bounds]
    logger.debug(f"Running {len(bounds)} chunks on {threads} threads")
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda bound: func(*bound), bounds))


def accumulate_bins(keys: np.ndarray, values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Sum complex values sharing an integer key; sums run in input order"""
    keys = np.asarray(keys, dtype=np.int64).reshape(-1)
    values = np.asarray(values, dtype=np.complex128).reshape(-1)
    if keys.size == 0:
        return keys, values
    unique, inverse = np.unique(keys, return_inverse=True)
    inverse = inverse.reshape(-1)
    real = np.bincount(inverse, weights=values.real, minlength=unique.size)
    imag = np.bincount(inverse, weights=values.imag, minlength=unique.size)
    return unique, real + 1j * imag


def merge_bins(partials: Sequence[Tuple[np.ndarray, np.ndarray]]) -> Tuple[np.ndarray, np.ndarray]:
    """Merge per-chunk (keys, sums) pairs in the given order"""
    if not partials:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.complex128)
    keys = np.concatenate([k for k, _ in partials])
    values = np.concatenate([v for _, v in partials])
    return accumulate_bins(keys, values)
