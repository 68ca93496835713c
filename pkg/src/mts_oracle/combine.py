"""Follow-the-Prediction and the deterministic/randomized combiners.

The two combiners are written as small schedulers (:class:`DetSchedule`,
:class:`WmrState`) that only see per-algorithm costs; problem adapters
(general MTS below, caching, matching) decide what "following" an
algorithm physically means.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .core import (
    INF,
    MetricSpace,
    MtsInstance,
    Policy,
    PredictionTrace,
    RunResult,
    Task,
    derive_seed,
    make_rng,
    trajectory_cost,
)
from .errors import InvariantViolation, LengthMismatch, NotADistribution, Unserviceable


def ftp_step(prev: int, task: Task, prediction: int, space: MetricSpace) -> int:
    """State minimizing ``service + 2 * dist(x, prediction)``.

    Ties go to the predicted state itself, then to the lowest index.
    """
    best_x, best_v = None, INF
    for x in space.points():
        c = task.cost(x)
        if c == INF:
            continue
        v = c + 2 * space.distance(x, prediction)
        if v < best_v:
            best_x, best_v = x, v
    if best_x is None:
        raise Unserviceable("all states have infinite cost")
    pc = task.cost(prediction)
    if pc < INF and pc == best_v:
        return prediction
    return best_x


class FtpPolicy(Policy):
    """Follow the Prediction as an MTS policy."""

    name = "ftp"

    def start(self, space, initial_state):
        self.space = space

    def step(self, prev, task, prediction, rng):
        if prediction is None:
            raise ValueError("FtP needs a prediction at every step")
        return ftp_step(prev, task, prediction, self.space)


# -- deterministic combination -------------------------------------------------


def _exact(x) -> Fraction:
    # decimal reading of floats so that gamma=1.01 is exactly 101/100
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True)
class CombinerConfigDet:
    algorithm_count: int
    gamma: Optional[float] = None

    def __post_init__(self):
        if self.algorithm_count < 2:
            raise ValueError("need at least two algorithms to combine")
        if self.gamma is None:
            m = self.algorithm_count
            object.__setattr__(self, "gamma", Fraction(m, m - 1))
        if not 1 < self.gamma <= 2:
            raise ValueError("gamma must lie in (1, 2]")

    @property
    def coefficient(self) -> float:
        """Worst-case multiplier ``2 gamma^m / (gamma - 1) + 1``."""
        g = _exact(self.gamma)
        return float(2 * g**self.algorithm_count / (g - 1) + 1)


class DetSchedule:
    """Cow-path switching schedule: follow A_(l mod m) while its cost <= gamma^l."""

    def __init__(self, m: int, gamma=None):
        cfg = CombinerConfigDet(m, gamma)
        self.m = m
        self.gamma = _exact(cfg.gamma)
        self.level = 0
        self.threshold = Fraction(1)
        self.current = 0
        self.switches = 0

    def choose(self, costs: Sequence[float]) -> int:
        """Index to follow given the algorithms' accumulated costs (after this step)."""
        before = self.current
        while costs[self.current] > self.threshold:
            self.level += 1
            self.threshold *= self.gamma
            self.current = self.level % self.m
        if self.current != before:
            self.switches += 1
        return self.current


class _Simulated:
    """One algorithm run virtually inside a combiner."""

    def __init__(self, policy: Policy, space: MetricSpace, x0: int, seed: int):
        self.policy = policy
        self.space = space
        self.state = x0
        self.cost = 0
        self.rng = make_rng(seed)
        policy.start(space, x0)

    def advance(self, task: Task, prediction) -> float:
        x = self.policy.step(self.state, task, prediction, self.rng)
        c = self.space.distance(self.state, x) + task.cost(x)
        if c == INF:
            raise InvariantViolation(f"{self.policy.name} moved to a forbidden state")
        self.state = x
        self.cost += c
        return c


def min_det_run(
    algorithms: Sequence[Policy],
    instance: MtsInstance,
    gamma=None,
    predictions: Optional[PredictionTrace] = None,
    seed: int = 0,
    check_switch: bool = True,
) -> RunResult:
    """Run the deterministic combiner over simulated MTS policies.

    Switching moves straight to the adopted algorithm's current state; the
    switch distance is checked against the sum of both algorithms' costs.
    """
    if predictions is not None and len(predictions) != len(instance):
        raise LengthMismatch("prediction trace length differs from instance length")
    space = instance.space
    sims = [
        _Simulated(a, space, instance.initial_state, derive_seed(seed, i))
        for i, a in enumerate(algorithms)
    ]
    sched = DetSchedule(len(sims), gamma)
    followed = 0
    prev = instance.initial_state
    states, log = [], []
    for t, task in enumerate(instance.tasks):
        p = predictions[t] if predictions is not None else None
        prev_costs = [s.cost for s in sims]
        for s in sims:
            s.advance(task, p)
        i = sched.choose([s.cost for s in sims])
        x = sims[i].state
        if i != followed:
            if check_switch and space.distance(prev, x) > prev_costs[followed] + sims[i].cost + 1e-9:
                raise InvariantViolation("switch cost exceeds the sum of algorithm costs")
            log.append({"t": t, "from": followed, "to": i})
            followed = i
        states.append(x)
        prev = x
    traj = trajectory_cost(instance, states)
    names = "+".join(a.name for a in algorithms)
    return RunResult(traj, f"min_det({names})", seed, log)


# -- randomized combination ----------------------------------------------------


@dataclass(frozen=True)
class CombinerConfigRand:
    """Weighted-majority state; weights are kept in log space to avoid underflow."""

    epsilon: float
    diameter: float
    log_weights: tuple = field(default=())

    def __post_init__(self):
        if not 0 < self.epsilon < 0.5:
            raise ValueError("epsilon must lie in (0, 1/2)")
        if self.diameter <= 0:
            raise ValueError("diameter must be positive")

    @classmethod
    def initial(cls, m: int, epsilon: float, diameter: float) -> "CombinerConfigRand":
        return cls(epsilon, diameter, (0.0,) * m)

    @property
    def beta(self) -> float:
        return 1 - self.epsilon / 2

    @property
    def weights(self) -> tuple:
        return tuple(math.exp(lw) for lw in self.log_weights)

    @property
    def distribution(self) -> tuple:
        top = max(self.log_weights)
        w = [math.exp(lw - top) for lw in self.log_weights]
        s = sum(w)
        return tuple(x / s for x in w)


def wmr_update(config: CombinerConfigRand, step_costs: Sequence[float]) -> CombinerConfigRand:
    """Multiply each weight by ``beta ** (cost / D)``."""
    if len(step_costs) != len(config.log_weights):
        raise LengthMismatch("one cost per algorithm expected")
    lb = math.log(config.beta) / config.diameter
    lw = tuple(w + lb * c for w, c in zip(config.log_weights, step_costs))
    return CombinerConfigRand(config.epsilon, config.diameter, lw)


def emd_transfer(p_old: Sequence[float], p_new: Sequence[float], tol: float = 1e-9) -> list:
    """Transport plan between two distributions moving the least mass.

    Each algorithm keeps ``min(p_old, p_new)`` on the diagonal; surplus mass
    of donors is poured into recipients' deficits, both in index order.
    """
    if len(p_old) != len(p_new):
        raise LengthMismatch("distributions of different sizes")
    for p in (p_old, p_new):
        if abs(sum(p) - 1) > tol or any(x < -tol for x in p):
            raise NotADistribution(f"not a probability vector: {p}")
    m = len(p_old)
    tau = [[0.0] * m for _ in range(m)]
    surplus, deficit = [], []
    for i in range(m):
        keep = min(p_old[i], p_new[i])
        tau[i][i] = keep
        surplus.append(p_old[i] - keep)
        deficit.append(p_new[i] - keep)
    j = 0
    for i in range(m):
        while surplus[i] > 0 and j < m:
            if deficit[j] <= 0:
                j += 1
                continue
            move = min(surplus[i], deficit[j])
            tau[i][j] += move
            surplus[i] -= move
            deficit[j] -= move
        # float residue below tol is left on the diagonal
        tau[i][i] += surplus[i]
    return tau


def emd_distance(tau) -> float:
    return sum(tau[i][j] for i in range(len(tau)) for j in range(len(tau)) if i != j)


class WmrState:
    """Tracks the distribution over algorithms and samples switches."""

    def __init__(self, m: int, epsilon: float, diameter: float, rng: random.Random):
        self.config = CombinerConfigRand.initial(m, epsilon, diameter)
        self.p = self.config.distribution
        self.rng = rng
        self.current = 0 if m == 1 else self._sample(self.p)
        self.switches = 0

    def _sample(self, p) -> int:
        u = self.rng.random()
        acc = 0.0
        for i, pi in enumerate(p):
            acc += pi
            if u < acc:
                return i
        return len(p) - 1

    def update(self, step_costs: Sequence[float]) -> int:
        if not any(step_costs):
            return self.current
        self.config = wmr_update(self.config, step_costs)
        p_new = self.config.distribution
        i = self.current
        # the current algorithm keeps all of its mass unless its probability drops
        if p_new[i] < self.p[i]:
            row = emd_transfer(self.p, p_new)[i]
            u = self.rng.random() * self.p[i]
            acc = 0.0
            nxt = i
            for j, mass in enumerate(row):
                acc += mass
                if u < acc:
                    nxt = j
                    break
            if nxt != i:
                self.switches += 1
                self.current = nxt
        self.p = p_new
        return self.current


def min_rand_run(
    algorithms: Sequence[Policy],
    instance: MtsInstance,
    epsilon: float = 0.01,
    diameter: Optional[float] = None,
    predictions: Optional[PredictionTrace] = None,
    seed: int = 0,
) -> RunResult:
    """Randomized combiner over simulated MTS policies."""
    if predictions is not None and len(predictions) != len(instance):
        raise LengthMismatch("prediction trace length differs from instance length")
    space = instance.space
    D = diameter if diameter is not None else space.diameter
    sims = [
        _Simulated(a, space, instance.initial_state, derive_seed(seed, i + 1))
        for i, a in enumerate(algorithms)
    ]
    wmr = WmrState(len(sims), epsilon, D if D > 0 else 1, make_rng(derive_seed(seed, 0)))
    states, log = [], []
    for t, task in enumerate(instance.tasks):
        p = predictions[t] if predictions is not None else None
        costs = [s.advance(task, p) for s in sims]
        before = wmr.current
        i = wmr.update(costs) if len(sims) > 1 else 0
        if i != before:
            log.append({"t": t, "from": before, "to": i})
        states.append(sims[i].state)
    traj = trajectory_cost(instance, states)
    names = "+".join(a.name for a in algorithms)
    return RunResult(traj, f"min_rand({names})", seed, log)


def robust_ftp(
    robust_baseline: Policy,
    instance: MtsInstance,
    predictions: PredictionTrace,
    epsilon: float = 0.01,
    seed: int = 0,
) -> RunResult:
    """Randomized combination of FtP with a robust baseline."""
    res = min_rand_run([FtpPolicy(), robust_baseline], instance, epsilon, None, predictions, seed)
    res.algorithm_id = f"robust_ftp({robust_baseline.name})"
    return res
