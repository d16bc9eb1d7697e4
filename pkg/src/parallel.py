# -*- coding: utf-8 -*-
"""
Order-preserving parallel map
=============================

Pair and point evaluations are independent; results come back in input order,
so reductions and witness selection do not depend on scheduling.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np


def parallel_map(func, items, threads=None):
    """map(func, items) on up to `threads` worker threads (serial if <= 1)."""
    items = list(items)
    if threads is None or int(threads) <= 1 or len(items) < 2:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=int(threads)) as pool:
        return list(pool.map(func, items))


def map_chunks(func, n, threads=None):
    """
    Concatenate func(slice) over up to `threads` contiguous slices of range(n).

    func returns an array whose first axis matches its slice.
    """
    n = int(n)
    parts = max(1, min(int(threads or 1), n))
    edges = np.linspace(0, n, parts + 1).astype(int)
    slices = [slice(int(edges[i]), int(edges[i + 1])) for i in range(parts)]
    out = parallel_map(func, slices, threads)
    return np.concatenate([np.asarray(o) for o in out]) if out else np.zeros(0)
