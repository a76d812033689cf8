"""Process-pool map with a deterministic, order-preserving contract."""

from __future__ import annotations

import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def pmap(fn: Callable[[T], R], items: Sequence[T], threads: int) -> list[R]:
    """Map preserving input order; falls back to serial on pool failure."""
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    try:
        with ProcessPoolExecutor(max_workers=min(threads, len(items))) as pool:
            chunk = max(1, len(items) // (8 * threads))
            return list(pool.map(fn, items, chunksize=chunk))
    except OSError as exc:  # pool unavailable in restricted environments
        print(f"process pool unavailable ({exc}); running serially", file=sys.stderr)
        return [fn(x) for x in items]
