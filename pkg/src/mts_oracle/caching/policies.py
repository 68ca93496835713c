"""Online caching policies and the request-by-request driver.

A policy exposes its current ``cache`` (a set) and answers ``request`` with
the number of pages it loaded for that request.  Lazy policies load at most
the requested page; non-lazy ones (e.g. the simulated Trust&Doubt) may load
more, and are made lazy with :class:`LazyWrapper`.
"""

from __future__ import annotations

import random
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Optional

from ..core import derive_seed, make_rng
from .model import CacheSchedule, CachingInstance, PredictedCache


class CachePolicy:
    name = "policy"
    lazy = True
    needs_prediction = False

    def start(self, k: int, rng: random.Random) -> None:
        self.k = k
        self.rng = rng
        self.cache: set = set()

    def request(self, page: int, predicted: Optional[set] = None) -> int:
        raise NotImplementedError


class LRU(CachePolicy):
    name = "lru"

    def start(self, k, rng):
        super().start(k, rng)
        self._order: OrderedDict = OrderedDict()

    def request(self, page, predicted=None):
        order = self._order
        if page in order:
            order.move_to_end(page)
            return 0
        if len(order) >= self.k:
            victim, _ = order.popitem(last=False)
            self.cache.remove(victim)
        order[page] = None
        self.cache.add(page)
        return 1


class Marker(CachePolicy):
    """Randomized marking: on a fault evict a uniformly random unmarked page."""

    name = "marker"

    def start(self, k, rng):
        super().start(k, rng)
        self.marked: set = set()
        self.phases = 1

    def request(self, page, predicted=None):
        cache = self.cache
        if page in cache:
            self.marked.add(page)
            return 0
        if len(cache) >= self.k:
            unmarked = cache - self.marked
            if not unmarked:
                self.marked = set()
                self.phases += 1
                unmarked = set(cache)
            victim = self.rng.choice(sorted(unmarked))
            cache.remove(victim)
        cache.add(page)
        self.marked.add(page)
        return 1


class _Recency:
    """Last-use timestamps, for least-recently-used choices among candidates."""

    def __init__(self):
        self.last: dict = {}
        self.clock = 0

    def touch(self, page):
        self.clock += 1
        self.last[page] = self.clock

    def lru(self, candidates):
        last = self.last
        return min(candidates, key=lambda p: (last.get(p, -1), p))


class FollowPrediction(CachePolicy):
    """Lazy Follow-the-Prediction for caching.

    The predicted configuration always contains the requested page, so the
    FtP target state is the prediction itself; lazily, a fault evicts the
    least recently used page missing from the prediction.
    """

    name = "ftp"
    needs_prediction = True

    def start(self, k, rng):
        super().start(k, rng)
        self._rec = _Recency()

    def request(self, page, predicted=None):
        self._rec.touch(page)
        if page in self.cache:
            return 0
        if len(self.cache) >= self.k:
            outside = self.cache - predicted
            victim = self._rec.lru(outside if outside else self.cache)
            self.cache.remove(victim)
        self.cache.add(page)
        return 1


class ScheduleFollower(CachePolicy):
    """Replays a fixed lazy schedule (e.g. an offline solution) as a policy."""

    lazy = True

    def __init__(self, schedule: CacheSchedule, name: str = "schedule"):
        self.schedule = schedule
        self.name = name

    def start(self, k, rng):
        super().start(k, rng)
        self._replay = PredictedCache(self.schedule)

    def request(self, page, predicted=None):
        before = page in self._replay.cache
        self.cache = self._replay.advance(page)
        return 0 if before else 1


class LazyWrapper(CachePolicy):
    """Runs a possibly non-lazy policy in the background and serves lazily.

    On a fault the real cache evicts its least recently used page among those
    missing from the simulated cache.
    """

    def __init__(self, inner: CachePolicy):
        self.inner = inner
        self.name = inner.name if inner.name.startswith("lazy") else f"lazy_{inner.name}"
        self.needs_prediction = inner.needs_prediction

    def start(self, k, rng):
        super().start(k, rng)
        self.inner.start(k, rng)
        self._rec = _Recency()
        self.simulated_cost = 0

    def request(self, page, predicted=None):
        self.simulated_cost += self.inner.request(page, predicted)
        self._rec.touch(page)
        if page in self.cache:
            return 0
        if len(self.cache) >= self.k:
            outside = self.cache - self.inner.cache
            self.cache.remove(self._rec.lru(outside))
        self.cache.add(page)
        return 1


@dataclass
class CachingRun:
    algorithm_id: str
    faults: int
    seed: int
    configs: Optional[list] = field(default=None, compare=False)

    @property
    def cost(self) -> int:
        return self.faults


def run_caching(
    policy: CachePolicy,
    instance: CachingInstance,
    predictions: Optional[CacheSchedule] = None,
    seed: int = 0,
    record: bool = False,
) -> CachingRun:
    """Serve every request; the cost is the number of pages loaded."""
    if policy.needs_prediction and predictions is None:
        raise ValueError(f"{policy.name} needs configuration predictions")
    rng = make_rng(derive_seed(seed, 0))
    policy.start(instance.k, rng)
    tracker = PredictedCache(predictions) if predictions is not None else None
    cost = 0
    configs = [] if record else None
    for r in instance.requests:
        pred = tracker.advance(r) if tracker is not None else None
        cost += policy.request(r, pred)
        if configs is not None:
            configs.append(frozenset(policy.cache))
    return CachingRun(policy.name, cost, seed, configs)
