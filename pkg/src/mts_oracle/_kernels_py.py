"""Pure-Python implementations of the hot caching kernels.

Inputs are dense page ids ``0..n_pages-1``.  These are the reference
semantics for the compiled versions in ``_ckernels.pyx``.
"""

import heapq
from collections import OrderedDict

import numpy as np

NO_EVICTION = -1


def furthest_schedule(requests, keys, k):
    """Lazy policy evicting the cached page with the largest stored key.

    ``keys[t]`` becomes the key of ``requests[t]`` once it is requested.
    Ties go to the lowest page id.  Returns ``(evictions, faults)``.
    """
    requests = [int(r) for r in requests]
    keys = [float(x) for x in keys]
    cache = {}
    heap = []
    ev = [NO_EVICTION] * len(requests)
    faults = 0
    for t, r in enumerate(requests):
        if r not in cache:
            faults += 1
            if len(cache) >= k:
                while True:
                    negkey, page = heapq.heappop(heap)
                    if cache.get(page) == -negkey:
                        break
                del cache[page]
                ev[t] = page
        key = keys[t]
        cache[r] = key
        heapq.heappush(heap, (-key, r))
        if len(heap) > 4 * k + 64:
            heap = [(-v, p) for p, v in cache.items()]
            heapq.heapify(heap)
    return ev, faults


def lru_schedule(requests, k):
    cache = OrderedDict()
    ev = [NO_EVICTION] * len(requests)
    faults = 0
    for t, r in enumerate(requests):
        r = int(r)
        if r in cache:
            cache.move_to_end(r)
            continue
        faults += 1
        if len(cache) >= k:
            ev[t], _ = cache.popitem(last=False)
        cache[r] = None
    return ev, faults


def pleco_weights(length, lag_offset=0):
    x = np.arange(length + 1, dtype=float) + lag_offset
    return (x + 10.0) ** -1.8 * np.exp(-x / 670.0)


def pleco_predictions(requests, lag_offset=0):
    """Predicted next arrival (1-indexed time) under the PLECO recency model."""
    T = len(requests)
    w = pleco_weights(T, lag_offset)
    denom = np.cumsum(w)
    positions = {}
    out = np.empty(T, dtype=float)
    for t in range(T):
        r = int(requests[t])
        pos = positions.setdefault(r, [])
        pos.append(t)
        lags = t - np.asarray(pos)
        out[t] = (t + 1) + denom[t] / w[lags].sum()
    return out


def popu_predictions(requests):
    counts = {}
    out = np.empty(len(requests), dtype=float)
    for t, r in enumerate(requests):
        c = counts.get(r, 0) + 1
        counts[r] = c
        out[t] = (t + 1) + (t + 1) / c
    return out


def next_arrivals(requests):
    T = len(requests)
    out = np.empty(T, dtype=np.int64)
    last = {}
    for t in range(T - 1, -1, -1):
        r = int(requests[t])
        out[t] = last.get(r, T) + 1
        last[r] = t
    return out


def belady_faults_batch(seqs, k):
    seqs = np.asarray(seqs, dtype=np.int64)
    out = np.empty(len(seqs), dtype=np.int64)
    for i, row in enumerate(seqs):
        out[i] = furthest_schedule(row, next_arrivals(row), k)[1]
    return out
