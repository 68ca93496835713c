"""Exact offline caching: furthest-in-future and an exhaustive DP oracle."""

from __future__ import annotations

import numpy as np

from .. import kernels
from ..errors import TooLarge
from .model import NO_EVICTION, CacheSchedule, CachingInstance


def densify(requests):
    """Map page ids to ``0..n-1`` preserving their order; returns (dense, ids)."""
    ids, dense = np.unique(np.asarray(requests, dtype=np.int64), return_inverse=True)
    return dense.astype(np.int64), ids


def furthest_key_schedule(requests, keys, k: int) -> CacheSchedule:
    """Lazy schedule evicting the cached page with the largest last key."""
    dense, ids = densify(requests)
    ev, _ = kernels.furthest_schedule(dense, np.asarray(keys, dtype=float), k)
    ev = tuple(int(ids[e]) if e != NO_EVICTION else NO_EVICTION for e in ev)
    return CacheSchedule(k, tuple(int(r) for r in requests), ev)


def belady_offline(instance: CachingInstance) -> CacheSchedule:
    """Optimal lazy schedule: evict the page requested furthest in the future.

    Pages never requested again count as infinitely far; ties go to the
    lowest page id.
    """
    dense, _ = densify(instance.requests)
    return furthest_key_schedule(instance.requests, kernels.next_arrivals(dense), instance.k)


def belady_faults(instance: CachingInstance) -> int:
    dense, _ = densify(instance.requests)
    return int(kernels.furthest_schedule(dense, kernels.next_arrivals(dense), instance.k)[1])


BRUTE_FORCE_LIMITS = {"length": 14, "pages": 6, "k": 4}


def brute_force_opt(instance: CachingInstance) -> int:
    """Minimum fault count by DP over every reachable cache configuration."""
    reqs = instance.requests
    k = instance.k
    if (
        len(reqs) > BRUTE_FORCE_LIMITS["length"]
        or len(set(reqs)) > BRUTE_FORCE_LIMITS["pages"]
        or k > BRUTE_FORCE_LIMITS["k"]
    ):
        raise TooLarge(f"instance exceeds brute-force limits {BRUTE_FORCE_LIMITS}")
    best = {frozenset(): 0}
    for r in reqs:
        nxt: dict = {}
        for cache, cost in best.items():
            if r in cache:
                cands = [(cache, cost)]
            elif len(cache) < k:
                cands = [(cache | {r}, cost + 1)]
            else:
                cands = [((cache - {e}) | {r}, cost + 1) for e in cache]
            for c, v in cands:
                if v < nxt.get(c, v + 1):
                    nxt[c] = v
        best = nxt
    return min(best.values())
