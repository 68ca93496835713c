"""Adversarial and random instance generators."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import numpy as np

from ..caching.model import CachingInstance
from ..core import INF, MtsInstance, Policy, PredictionTrace, Task, UniformMetric, make_rng, trajectory_cost
from ..matching import MatchingInstance


@dataclass(frozen=True)
class AdversaryInstance:
    instance: MtsInstance
    predictions: PredictionTrace
    offline_states: tuple
    phase_length: int
    probe_states: tuple

    @property
    def offline_cost(self):
        return trajectory_cost(self.instance, self.offline_states).total


def gen_uniform_mts_adversary(n: int, eta_bar: float, rounds: int, probe: Policy, seed: int = 0) -> AdversaryInstance:
    """Phased instance forcing a deterministic probe policy to keep moving.

    Each phase issues ``min(n - 2, floor(eta_bar))`` tasks that are infinite
    at the probe's current position and free elsewhere, then one task that
    is free only at a point ``p`` the probe has not visited this phase.
    The offline trajectory sits at ``p`` for the whole phase.  Predictions
    during forcing steps name the lowest unvisited point other than the
    probe's position; the last step of a phase predicts ``p``.
    """
    if n < 3:
        raise ValueError("the adversary needs n >= 3")
    if eta_bar < 0:
        raise ValueError("eta_bar must be nonnegative")
    space = UniformMetric(n)
    forcing = min(n - 2, math.floor(eta_bar))
    rng = make_rng(seed)
    probe.start(space, 0)
    x = 0
    tasks, preds, offline, visited_all = [], [], [], []
    for _ in range(rounds):
        visited = {x}
        phase_tasks, phase_preds = [], []
        for _ in range(forcing):
            costs = tuple(INF if y == x else 0 for y in range(n))
            pred = min(y for y in range(n) if y not in visited and y != x)
            task = Task(costs)
            x = probe.step(x, task, pred, rng)
            if task.cost(x) == INF:
                raise ValueError("probe moved to a forbidden state")
            visited.add(x)
            visited_all.append(x)
            phase_tasks.append(task)
            phase_preds.append(pred)
        p = min(y for y in range(n) if y not in visited)
        task = Task(tuple(0 if y == p else INF for y in range(n)))
        x = probe.step(x, task, p, rng)
        visited_all.append(x)
        phase_tasks.append(task)
        phase_preds.append(p)
        tasks += phase_tasks
        preds += phase_preds
        offline += [p] * len(phase_tasks)
    inst = MtsInstance(space, 0, tuple(tasks))
    return AdversaryInstance(inst, PredictionTrace(tuple(preds)), tuple(offline), forcing + 1, tuple(visited_all))


def gen_coupon_collector_caching(k: int, length: int, seed: int = 0) -> CachingInstance:
    """Uniform i.i.d. requests over ``k + 1`` pages."""
    rng = np.random.default_rng(seed)
    return CachingInstance(k, tuple(int(x) for x in rng.integers(0, k + 1, size=length)))


def random_caching_instance(k: int, length: int, pages: int, seed: int = 0) -> CachingInstance:
    rng = np.random.default_rng(seed)
    return CachingInstance(k, tuple(int(x) for x in rng.integers(0, pages, size=length)))


def random_line_matching(n: int, seed: int = 0, span: int = 100) -> MatchingInstance:
    rng = random.Random(seed)
    return MatchingInstance(
        tuple(rng.randint(0, span) for _ in range(n)),
        tuple(rng.randint(0, span) for _ in range(n)),
    )


def random_uniform_mts(n: int, length: int, seed: int = 0, inf_prob: float = 0.1) -> MtsInstance:
    """Uniform-metric instance with integer costs in [0, 3] and occasional infinities."""
    rng = random.Random(seed)
    tasks = []
    for _ in range(length):
        costs = [INF if rng.random() < inf_prob else rng.randint(0, 3) for _ in range(n)]
        if all(c == INF for c in costs):
            costs[rng.randrange(n)] = rng.randint(0, 3)
        tasks.append(Task(tuple(costs)))
    return MtsInstance(UniformMetric(n), rng.randrange(n), tuple(tasks))
