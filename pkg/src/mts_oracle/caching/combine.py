"""Deterministic and randomized combination of caching policies.

Switching never flushes the cache: on a fault the physical cache evicts its
least recently used page among those missing from the followed policy's
cache, one eviction per fault.
"""

from __future__ import annotations

from ..combine import DetSchedule, WmrState
from ..core import derive_seed, make_rng
from .policies import CachePolicy, _Recency


class _Combined(CachePolicy):
    lazy = True

    def __init__(self, policies):
        if len(policies) < 1:
            raise ValueError("need at least one policy")
        self.policies = list(policies)
        self.needs_prediction = any(p.needs_prediction for p in self.policies)

    def start(self, k, rng):
        super().start(k, rng)
        for i, p in enumerate(self.policies):
            p.start(k, make_rng(derive_seed(rng.getrandbits(63), i)))
        self.costs = [0] * len(self.policies)
        self._rec = _Recency()
        self.switches = 0
        self.followed = 0

    def _follow(self, step_costs) -> int:
        raise NotImplementedError

    def request(self, page, predicted=None):
        step = [p.request(page, predicted) for p in self.policies]
        for i, c in enumerate(step):
            self.costs[i] += c
        i = self._follow(step)
        if i != self.followed:
            self.switches += 1
            self.followed = i
        self._rec.touch(page)
        if page in self.cache:
            return 0
        if len(self.cache) >= self.k:
            outside = self.cache - self.policies[i].cache
            self.cache.remove(self._rec.lru(outside))
        self.cache.add(page)
        return 1


class MinDetCache(_Combined):
    def __init__(self, policies, gamma=None):
        super().__init__(policies)
        self.gamma = gamma
        self.name = "min_det(" + ",".join(p.name for p in self.policies) + ")"

    def start(self, k, rng):
        super().start(k, rng)
        self._sched = DetSchedule(len(self.policies), self.gamma) if len(self.policies) > 1 else None

    def _follow(self, step_costs):
        if self._sched is None:
            return 0
        return self._sched.choose(self.costs)


class MinRandCache(_Combined):
    """Randomized combiner; the diameter of the configuration space is ``k``."""

    def __init__(self, policies, epsilon=0.01):
        super().__init__(policies)
        self.epsilon = epsilon
        self.name = "min_rand(" + ",".join(p.name for p in self.policies) + ")"

    def start(self, k, rng):
        super().start(k, rng)
        self._wmr = WmrState(len(self.policies), self.epsilon, k, make_rng(derive_seed(rng.getrandbits(63), 99)))
        self.followed = self._wmr.current

    def _follow(self, step_costs):
        if len(self.policies) == 1:
            return 0
        return self._wmr.update(step_costs)


def robust_ftp_cache(epsilon=0.01) -> MinRandCache:
    """Randomized combination of lazy FtP with Marker."""
    from .policies import FollowPrediction, Marker

    c = MinRandCache([FollowPrediction(), Marker()], epsilon)
    c.name = "robust_ftp"
    return c
