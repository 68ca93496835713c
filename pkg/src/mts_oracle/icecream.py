"""The two-state ice-cream problem.

States ``v`` (0) and ``c`` (1) are at distance 1.  A ``V`` request costs 1
in ``v`` and 2 in ``c``; a ``C`` request costs 2 in ``c`` and 4 in ``v``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import INF, MtsInstance, Policy, PredictionTrace, Task, UniformMetric

V, C = "V", "C"
STATE_V, STATE_C = 0, 1
STATE_NAMES = ("v", "c")

_TASKS = {V: Task((1, 2)), C: Task((4, 2))}


@dataclass(frozen=True)
class IceCreamInstance:
    requests: tuple

    def __post_init__(self):
        reqs = tuple(self.requests)
        if not reqs:
            raise ValueError("an ice-cream instance needs at least one request")
        bad = [r for r in reqs if r not in _TASKS]
        if bad:
            raise ValueError(f"unknown ice-cream request {bad[0]!r}")
        object.__setattr__(self, "requests", reqs)

    def __len__(self):
        return len(self.requests)


def icecream_task(request: str) -> Task:
    return _TASKS[request]


def _state(start) -> int:
    if start in (STATE_V, STATE_C):
        return start
    return STATE_NAMES.index(str(start).lower())


def to_mts(instance: IceCreamInstance, start="v") -> MtsInstance:
    return MtsInstance(UniformMetric(2), _state(start), tuple(_TASKS[r] for r in instance.requests))


def icecream_opt(instance: IceCreamInstance, start="v"):
    """Exact optimum ``(cost, states)``; on ties the backtrack stays put."""
    x0 = _state(start)
    cost = [0 if x == x0 else 1 for x in (0, 1)]
    back = []
    for r in instance.requests:
        ell = _TASKS[r].costs
        new, arg = [0, 0], [0, 0]
        for s in (0, 1):
            stay, move = cost[s], cost[1 - s] + 1
            arg[s] = s if stay <= move else 1 - s
            new[s] = min(stay, move) + ell[s]
        cost = new
        back.append(arg)
    # prefer ending where the last optimal move came from, i.e. stay on ties
    if cost[0] != cost[1]:
        x = 0 if cost[0] < cost[1] else 1
    else:
        x = x0 if len(back) == 0 else _tie_end(back, x0)
    states = [x]
    for arg in reversed(back[1:]):
        x = arg[x]
        states.append(x)
    states.reverse()
    return min(cost), states


def _tie_end(back, x0) -> int:
    # both end states are optimal: pick the one whose backtracked path moves least
    best = None
    for end in (0, 1):
        x, moves, prev = end, 0, None
        path = [end]
        for arg in reversed(back[1:]):
            x = arg[x]
            path.append(x)
        path.reverse()
        prev = x0
        for s in path:
            moves += s != prev
            prev = s
        if best is None or moves < best[0]:
            best = (moves, end)
    return best[1]


class WorkFunctionPolicy(Policy):
    """Work function algorithm with ties favoring the current state.

    The recurrence is generic over any finite metric, but it is only
    validated on the ice-cream instance.
    """

    name = "work_function"

    def start(self, space, initial_state):
        n = space.point_count
        self.space = space
        self.dist = np.array([[space.distance(x, y) for y in range(n)] for x in range(n)], dtype=float)
        self.w = self.dist[initial_state].copy()

    def step(self, prev, task, prediction, rng):
        ell = np.asarray(task.costs, dtype=float)
        self.w = np.min(self.w[:, None] + ell[:, None] + self.dist, axis=0)
        score = self.w + self.dist[prev]
        # a state that cannot serve the task is never chosen
        score = np.where(ell < INF, score, INF)
        best = score.min()
        if score[prev] == best:
            return prev
        return int(np.argmin(score))


def noisy_opt_predictor(instance: IceCreamInstance, p: float, seed: int = 0, start="v") -> PredictionTrace:
    """Optimal states, each flipped independently with probability ``p``."""
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    _, states = icecream_opt(instance, start)
    flips = np.random.default_rng(seed).random(len(states)) < p
    return PredictionTrace(tuple(int(s) ^ int(f) for s, f in zip(states, flips)))


def random_instance(length: int, seed: int = 0) -> IceCreamInstance:
    rng = np.random.default_rng(seed)
    return IceCreamInstance(tuple(V if b else C for b in rng.random(length) < 0.5))
