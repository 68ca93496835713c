"""Metrical task systems: metrics, tasks, trajectories and the online driver.

States are dense integer indices ``0..n-1``.  Infinite service costs are
represented by ``INF`` (IEEE infinity), never by a large finite number.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

import numpy as np

from .errors import (
    InvalidTrajectory,
    LengthMismatch,
    Unserviceable,
    ZeroReference,
)

INF = math.inf


class MetricSpace:
    """Finite metric space over points ``0..point_count-1``."""

    point_count: int

    def distance(self, x: int, y: int) -> float:
        raise NotImplementedError

    @property
    def diameter(self) -> float:
        n = self.point_count
        return max(
            (self.distance(x, y) for x in range(n) for y in range(x + 1, n)),
            default=0,
        )

    def points(self) -> range:
        return range(self.point_count)

    def check_axioms(self, samples: int = 1000, seed: int = 0) -> None:
        """Check the metric axioms on ``samples`` random triples; raise ValueError on violation."""
        rng = random.Random(seed)
        n = self.point_count
        diam = self.diameter
        for _ in range(samples):
            x, y, z = (rng.randrange(n) for _ in range(3))
            dxy = self.distance(x, y)
            if self.distance(x, x) != 0:
                raise ValueError(f"distance({x}, {x}) is not zero")
            if dxy < 0 or dxy != self.distance(y, x):
                raise ValueError(f"distance({x}, {y}) is negative or asymmetric")
            if dxy > self.distance(x, z) + self.distance(z, y) + 1e-9:
                raise ValueError(f"triangle inequality fails for ({x}, {z}, {y})")
            if dxy > diam:
                raise ValueError("diameter is smaller than a distance")


class UniformMetric(MetricSpace):
    """All distinct points at distance 1."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("need at least one point")
        self.point_count = n

    def distance(self, x: int, y: int) -> int:
        return 0 if x == y else 1

    @property
    def diameter(self) -> int:
        return 1 if self.point_count > 1 else 0

    def __repr__(self) -> str:
        return f"UniformMetric({self.point_count})"


class LineMetric(MetricSpace):
    """Points embedded on the real line by coordinate."""

    def __init__(self, coords: Sequence[float]):
        if len(coords) < 1:
            raise ValueError("need at least one point")
        self.coords = tuple(coords)
        self.point_count = len(self.coords)

    def distance(self, x: int, y: int) -> float:
        return abs(self.coords[x] - self.coords[y])

    @property
    def diameter(self) -> float:
        return max(self.coords) - min(self.coords)

    def __repr__(self) -> str:
        return f"LineMetric({list(self.coords)})"


class MatrixMetric(MetricSpace):
    """Explicit distance matrix; validated for symmetry and zero diagonal."""

    def __init__(self, matrix):
        m = np.asarray(matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("distance matrix must be square")
        if not np.allclose(m, m.T) or np.any(np.diag(m) != 0) or np.any(m < 0):
            raise ValueError("not a metric: needs symmetry, zero diagonal, nonnegativity")
        self._m = m
        self.point_count = m.shape[0]
        self._diam = float(m.max())

    def distance(self, x: int, y: int) -> float:
        return float(self._m[x, y])

    @property
    def diameter(self) -> float:
        return self._diam


@dataclass(frozen=True)
class Task:
    """Service cost per state; ``INF`` marks a forbidden state."""

    costs: tuple

    def __post_init__(self):
        if not any(c < INF for c in self.costs):
            raise Unserviceable("task has infinite cost everywhere")
        if any(c < 0 for c in self.costs):
            raise ValueError("task costs must be nonnegative")

    def cost(self, x: int) -> float:
        return self.costs[x]

    def __len__(self) -> int:
        return len(self.costs)


@dataclass
class MtsInstance:
    space: MetricSpace
    initial_state: int
    tasks: list

    def __post_init__(self):
        if not 0 <= self.initial_state < self.space.point_count:
            raise ValueError(f"initial state {self.initial_state} outside the space")
        for task in self.tasks:
            if len(task) != self.space.point_count:
                raise ValueError("task length does not match the number of points")

    def __len__(self) -> int:
        return len(self.tasks)


@dataclass(frozen=True)
class Trajectory:
    states: tuple
    movement_costs: tuple
    service_costs: tuple
    total: float

    @property
    def movement(self) -> float:
        return sum(self.movement_costs)

    @property
    def service(self) -> float:
        return sum(self.service_costs)


@dataclass(frozen=True)
class PredictionTrace:
    predictions: tuple

    def __len__(self) -> int:
        return len(self.predictions)

    def __getitem__(self, t):
        return self.predictions[t]


@dataclass
class RunResult:
    trajectory: Trajectory
    algorithm_id: str
    seed: int
    per_step_log: Optional[list] = field(default=None, compare=False)

    @property
    def cost(self) -> float:
        return self.trajectory.total


def trajectory_cost(instance: MtsInstance, states: Sequence[int]) -> Trajectory:
    """Decompose the cost of visiting ``states`` (x_1..x_T) from x_0."""
    if len(states) != len(instance.tasks):
        raise InvalidTrajectory(
            f"trajectory has {len(states)} states for {len(instance.tasks)} tasks"
        )
    dist = instance.space.distance
    prev = instance.initial_state
    moves, services = [], []
    for t, (x, task) in enumerate(zip(states, instance.tasks)):
        service = task.cost(x)
        if service == INF:
            raise InvalidTrajectory(f"state {x} pays infinite cost at step {t}")
        moves.append(dist(prev, x))
        services.append(service)
        prev = x
    total = sum(moves) + sum(services)
    return Trajectory(tuple(states), tuple(moves), tuple(services), total)


def prediction_error(trace, offline, space: MetricSpace) -> float:
    """Sum of per-step distances between predicted and reference states."""
    preds = trace.predictions if isinstance(trace, PredictionTrace) else tuple(trace)
    ref = offline.states if isinstance(offline, Trajectory) else tuple(offline)
    if len(preds) != len(ref):
        raise LengthMismatch(f"{len(preds)} predictions vs {len(ref)} reference states")
    return sum(space.distance(p, o) for p, o in zip(preds, ref))


def competitive_ratio(alg_cost: float, reference_cost: float) -> float:
    if reference_cost == 0:
        raise ZeroReference("reference cost is zero")
    return alg_cost / reference_cost


class Policy:
    """A stepwise online MTS policy.

    ``start`` resets internal state for a fresh run; ``step`` sees the task of
    the current step (one-step lookahead) and returns the new state.
    """

    name = "policy"

    def start(self, space: MetricSpace, initial_state: int) -> None:
        pass

    def step(self, prev: int, task: Task, prediction: Optional[int], rng: random.Random) -> int:
        raise NotImplementedError


class GreedyPolicy(Policy):
    """Move to the cheapest state for the current task, ignoring movement."""

    name = "greedy"

    def step(self, prev, task, prediction, rng):
        best = min(task.costs)
        if task.costs[prev] == best:
            return prev
        return task.costs.index(best)


class StayPolicy(Policy):
    """Stay in place whenever the current state is serviceable, else act greedily."""

    name = "stay"

    def step(self, prev, task, prediction, rng):
        if task.costs[prev] < INF:
            return prev
        return task.costs.index(min(task.costs))


def make_rng(seed: int) -> random.Random:
    return random.Random(seed)


def derive_seed(master: int, *path: int) -> int:
    """Independent 64-bit seed for a (master, trial, ...) coordinate."""
    ss = np.random.SeedSequence([master & (2**64 - 1), *path])
    return int(ss.generate_state(1, np.uint64)[0])


def run_online(
    algorithm: Policy,
    instance: MtsInstance,
    predictions: Optional[PredictionTrace] = None,
    seed: int = 0,
    log: bool = False,
) -> RunResult:
    if predictions is not None and len(predictions) != len(instance.tasks):
        raise LengthMismatch("prediction trace length differs from instance length")
    rng = make_rng(seed)
    algorithm.start(instance.space, instance.initial_state)
    prev = instance.initial_state
    states = []
    records: list[Any] | None = [] if log else None
    for t, task in enumerate(instance.tasks):
        p = predictions[t] if predictions is not None else None
        x = algorithm.step(prev, task, p, rng)
        states.append(x)
        if records is not None:
            records.append({"t": t, "state": x, "prediction": p})
        prev = x
    traj = trajectory_cost(instance, states)
    return RunResult(traj, getattr(algorithm, "name", type(algorithm).__name__), seed, records)


def offline_optimum(instance: MtsInstance) -> Trajectory:
    """Exact optimum by dynamic programming over states (O(T n^2))."""
    space = instance.space
    n = space.point_count
    if not instance.tasks:
        return trajectory_cost(instance, [])
    dist = np.array([[space.distance(x, y) for y in range(n)] for x in range(n)], dtype=float)
    cost = np.full(n, INF)
    cost[instance.initial_state] = 0.0
    back = []
    for task in instance.tasks:
        total = cost[:, None] + dist
        arg = np.argmin(total, axis=0)
        cost = total[arg, np.arange(n)] + np.asarray(task.costs, dtype=float)
        back.append(arg)
    x = int(np.argmin(cost))
    states = [x]
    for arg in reversed(back[1:]):
        x = int(arg[x])
        states.append(x)
    states.reverse()
    return trajectory_cost(instance, states)
