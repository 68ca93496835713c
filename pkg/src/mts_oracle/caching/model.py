"""Caching instances, phases, configuration distance and lazy schedules."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from ..errors import LengthMismatch, SizeMismatch

NO_EVICTION = -1


@dataclass(frozen=True)
class CachingInstance:
    k: int
    requests: tuple

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("cache size must be positive")
        if len(self.requests) == 0:
            raise ValueError("request sequence must be non-empty")
        object.__setattr__(self, "requests", tuple(int(r) for r in self.requests))

    def __len__(self) -> int:
        return len(self.requests)

    @property
    def pages(self) -> frozenset:
        return frozenset(self.requests)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.requests, dtype=np.int64)


def phase_partition(requests: Sequence[int], k: int) -> list:
    """Start indices (0-based) of the phases; the first is always 0.

    A phase closes right before the request that would be its (k+1)-st
    distinct page.
    """
    starts = []
    seen: set = set()
    for t, r in enumerate(requests):
        if not starts:
            starts.append(t)
        if r not in seen and len(seen) == k:
            starts.append(t)
            seen = set()
        seen.add(r)
    return starts


def split_phases(requests: Sequence[int], k: int) -> list:
    bounds = phase_partition(requests, k) + [len(requests)]
    return [list(requests[a:b]) for a, b in zip(bounds, bounds[1:])]


def config_distance(x, y) -> int:
    """Pages to load when moving from configuration ``x`` to ``y``."""
    if len(x) != len(y):
        raise SizeMismatch(f"configurations of size {len(x)} and {len(y)}")
    return len(set(x) - set(y))


@dataclass(frozen=True)
class CacheSchedule:
    """A lazy cache trajectory stored as one eviction per step.

    At step ``t`` the page ``requests[t]`` is loaded if missing, evicting
    ``evictions[t]`` (``NO_EVICTION`` while the cache is not yet full).
    Used both for configuration predictions and for offline solutions.
    """

    k: int
    requests: tuple
    evictions: tuple

    def __post_init__(self):
        if len(self.requests) != len(self.evictions):
            raise LengthMismatch("one eviction entry per request expected")

    def __len__(self) -> int:
        return len(self.requests)

    @property
    def faults(self) -> int:
        return sum(1 for _ in self.fault_steps())

    def fault_steps(self) -> Iterator[int]:
        cache: set = set()
        for t, (r, e) in enumerate(zip(self.requests, self.evictions)):
            if r not in cache:
                if e != NO_EVICTION:
                    cache.discard(e)
                cache.add(r)
                yield t

    def configs(self) -> Iterator[frozenset]:
        """Configuration after each step."""
        for cache in self.live():
            yield frozenset(cache)

    def live(self) -> Iterator[set]:
        """Same as :meth:`configs` but yields one mutable set, updated in place."""
        cache: set = set()
        for r, e in zip(self.requests, self.evictions):
            if r not in cache:
                if e != NO_EVICTION:
                    if e not in cache:
                        raise ValueError(f"schedule evicts {e}, which is not cached")
                    cache.remove(e)
                if len(cache) >= self.k:
                    raise ValueError("schedule overfills the cache")
                cache.add(r)
            yield cache

    def is_lazy(self) -> bool:
        prev: frozenset = frozenset()
        for r, cur in zip(self.requests, self.configs()):
            if r in prev and cur != prev:
                return False
            if len(cur - prev) > 1 or len(prev - cur) > 1:
                return False
            prev = cur
        return True

    @classmethod
    def from_configs(cls, k: int, requests: Sequence[int], configs) -> "CacheSchedule":
        """Encode a lazy sequence of configurations."""
        ev = []
        prev: frozenset = frozenset()
        for r, c in zip(requests, configs):
            c = frozenset(c)
            gone = prev - c
            if (r in prev and c != prev) or len(gone) > 1 or len(c - prev) > 1:
                raise ValueError("configuration sequence is not lazy")
            ev.append(next(iter(gone)) if gone else NO_EVICTION)
            prev = c
        return cls(k, tuple(requests), tuple(ev))


def schedule_error(pred: CacheSchedule, ref: CacheSchedule) -> int:
    """Sum over steps of ``config_distance(P_t, O_t)``."""
    if len(pred) != len(ref):
        raise LengthMismatch("schedules of different lengths")
    p: set = set()
    o: set = set()
    diff = 0  # |P \ O|
    total = 0
    for r, ep, eo in zip(pred.requests, pred.evictions, ref.evictions):
        if r not in p:
            if ep != NO_EVICTION:
                p.remove(ep)
                if ep not in o:
                    diff -= 1
            p.add(r)
            if r not in o:
                diff += 1
        if r not in o:
            if eo != NO_EVICTION:
                o.remove(eo)
                if eo in p:
                    diff += 1
            o.add(r)
            if r in p:
                diff -= 1
        if len(p) != len(o):
            raise SizeMismatch("schedules diverge in cache size")
        total += diff
    return total


class PredictedCache:
    """Incrementally replays a prediction schedule, one request at a time."""

    def __init__(self, schedule: CacheSchedule):
        self.schedule = schedule
        self.cache: set = set()
        self.t = 0

    def advance(self, request: int) -> set:
        t = self.t
        if self.schedule.requests[t] != request:
            raise LengthMismatch(f"prediction for step {t} is about another request")
        if request not in self.cache:
            e = self.schedule.evictions[t]
            if e != NO_EVICTION:
                self.cache.remove(e)
            self.cache.add(request)
        self.t += 1
        return self.cache
