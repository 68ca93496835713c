"""Online metric matching with configuration predictions.

Servers are referred to by index into ``MatchingInstance.servers``.  On the
line, server and request locations are real coordinates; for a general
metric they are point ids of a :class:`~mts_oracle.core.MetricSpace`.

The robust baseline is the (2n-1)-competitive permutation algorithm, so the
combined guarantee is ``min{O(n), 9 + 8e * eta / Off}`` rather than the
``O(log n)`` form available with a line-specific robust algorithm.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .combine import DetSchedule
from .core import MetricSpace
from .errors import InfeasiblePrediction, InvariantViolation, SizeMismatch

TOL = 1e-9


@dataclass(frozen=True)
class MatchingInstance:
    servers: tuple
    requests: tuple
    space: Optional[MetricSpace] = None

    def __post_init__(self):
        if len(self.servers) != len(self.requests):
            raise SizeMismatch(f"{len(self.servers)} servers for {len(self.requests)} requests")
        object.__setattr__(self, "servers", tuple(self.servers))
        object.__setattr__(self, "requests", tuple(self.requests))

    @property
    def n(self) -> int:
        return len(self.servers)

    def dist(self, a, b):
        if self.space is None:
            return abs(a - b)
        return self.space.distance(a, b)

    def server_dist(self, s: int, point) -> float:
        return self.dist(self.servers[s], point)

    def cost_of(self, assignment: Sequence[int]) -> float:
        """Total edge cost of matching request ``j`` to server ``assignment[j]``."""
        return sum(self.server_dist(s, r) for s, r in zip(assignment, self.requests))


def min_cost_matching(A: Sequence, B: Sequence, dist=None):
    """Minimum-cost perfect matching between two equal-size point multisets.

    Returns ``(cost, pairs)`` with ``pairs`` a list of ``(index_in_A,
    index_in_B)``.  Without ``dist`` the points are line coordinates and the
    sorted pairing is used.
    """
    if len(A) != len(B):
        raise SizeMismatch(f"sets of sizes {len(A)} and {len(B)}")
    if not A:
        return 0, []
    if dist is None:
        ia = sorted(range(len(A)), key=lambda i: (A[i], i))
        ib = sorted(range(len(B)), key=lambda j: (B[j], j))
        pairs = list(zip(ia, ib))
        return sum(abs(A[i] - B[j]) for i, j in pairs), sorted(pairs)
    C = np.array([[dist(a, b) for b in B] for a in A], dtype=float)
    rows, cols = linear_sum_assignment(C)
    pairs = [(int(i), int(j)) for i, j in zip(rows, cols)]
    return sum(dist(A[i], B[j]) for i, j in pairs), pairs


def set_distance(A: Sequence, B: Sequence, dist=None):
    return min_cost_matching(A, B, dist)[0]


def server_set_distance(instance: MatchingInstance, X, Y):
    """Distance between two server-index sets (common servers match for free)."""
    X, Y = set(X), set(Y)
    if len(X) != len(Y):
        raise SizeMismatch(f"server sets of sizes {len(X)} and {len(Y)}")
    xs = sorted(X - Y)
    ys = sorted(Y - X)
    pts = instance.servers
    d = None if instance.space is None else instance.dist
    return set_distance([pts[s] for s in xs], [pts[s] for s in ys], d)


def _match_servers(instance: MatchingInstance, xs, ys):
    """Optimal pairing of server lists ``xs`` and ``ys`` as a list of (x, y)."""
    pts = instance.servers
    d = None if instance.space is None else instance.dist
    _, pairs = min_cost_matching([pts[s] for s in xs], [pts[s] for s in ys], d)
    return [(xs[i], ys[j]) for i, j in pairs]


class FtpMatcher:
    """Follow-the-Prediction for online matching.

    ``mu`` is an optimal matching between the used servers ``S`` and the
    last predicted set ``P``, identity on ``S & P`` and on servers outside
    ``S | P``; only the non-identity pairs are stored (in both directions).
    """

    name = "ftp"

    def __init__(self, instance: MatchingInstance):
        self.instance = instance
        self.used: set = set()
        self.assignment: list = []
        self.cost = 0
        self.P: frozenset = frozenset()
        self.mu: dict = {}

    @property
    def config(self) -> frozenset:
        return frozenset(self.used)

    def potential(self) -> float:
        """Cost of ``mu``, i.e. the distance between ``S`` and ``P``."""
        inst = self.instance
        return sum(inst.dist(inst.servers[a], inst.servers[b]) for a, b in self.mu.items() if a in self.used)

    def _rebase(self, P):
        P = frozenset(P)
        pairs = _match_servers(self.instance, sorted(self.used - P), sorted(P - self.used))
        self.mu = {}
        for a, b in pairs:
            self.mu[a] = b
            self.mu[b] = a
        self.P = P

    def step(self, r, P_prev, P_next) -> int:
        i = len(self.used)
        P_prev, P_next = frozenset(P_prev), frozenset(P_next)
        n = self.instance.n
        if len(P_next) != i + 1 or len(P_prev) != i or not all(0 <= s < n for s in P_next):
            raise InfeasiblePrediction(f"round {i + 1}: need predicted sets of sizes {i} and {i + 1}")
        if P_prev != self.P:
            self._rebase(P_prev)
        inst = self.instance
        pts = inst.servers
        # match P_next against P_prev + {r}, identity on the intersection
        xs = sorted(P_next - P_prev)
        ys = sorted(P_prev - P_next)
        d = None if inst.space is None else inst.dist
        _, pairs = min_cost_matching([pts[s] for s in xs], [pts[s] for s in ys] + [r], d)
        s = next(xs[a] for a, b in pairs if b == len(ys))
        chosen = self.mu.get(s, s)
        if chosen in self.used:
            raise InvariantViolation(f"FtP picked used server {chosen}")
        self.used.add(chosen)
        self.assignment.append(chosen)
        self.cost += inst.server_dist(chosen, r)
        self._rebase(P_next)
        return chosen


class PermutationMatcher:
    """The permutation algorithm: assign each request the server newly used
    by the offline optimum on the requests so far.

    The optimum is maintained by successive shortest augmenting paths, so it
    always uses the previous optimum's servers plus exactly one new server;
    ties among free servers go to the lowest index.
    """

    name = "permutation"

    def __init__(self, instance: MatchingInstance):
        self.instance = instance
        n = instance.n
        self.used: set = set()
        self.assignment: list = []
        self.cost = 0
        self.opt_of_req: list = []  # offline optimum: request j -> server
        self.req_of_server = [-1] * n
        self._C = np.zeros((0, n))
        self.opt_cost = 0

    @property
    def config(self) -> frozenset:
        return frozenset(self.used)

    def step(self, r, *_ignored) -> int:
        inst = self.instance
        n = inst.n
        row = np.array([inst.server_dist(s, r) for s in range(n)], dtype=float)
        C = np.vstack([self._C, row])
        m = len(C)
        new = m - 1
        match_s = np.array(self.opt_of_req + [-1])
        dist_r = np.full(m, math.inf)
        dist_r[new] = 0.0
        pred_s = np.full(n, -1)
        dist_s = np.full(n, math.inf)
        for _ in range(2 * m + 2):
            cand = dist_r[:, None] + C
            best_j = np.argmin(cand, axis=0)
            best = cand[best_j, np.arange(n)]
            improved = best < dist_s - TOL
            dist_s = np.where(improved, best, dist_s)
            pred_s = np.where(improved, best_j, pred_s)
            changed = False
            for s in np.nonzero(improved)[0]:
                j = self.req_of_server[s]
                if j >= 0:
                    v = dist_s[s] - C[j, s]
                    if v < dist_r[j] - TOL:
                        dist_r[j] = v
                        changed = True
            if not changed:
                break
        free = [s for s in range(n) if self.req_of_server[s] < 0]
        target = min(free, key=lambda s: (dist_s[s], s))
        lo = dist_s[target]
        target = min(s for s in free if dist_s[s] <= lo + TOL)
        # augment along the alternating path ending at target
        s = target
        while True:
            j = int(pred_s[s])
            prev_s = match_s[j]
            match_s[j] = s
            self.req_of_server[s] = j
            if j == new:
                break
            s = prev_s
        self.opt_of_req = [int(x) for x in match_s]
        self._C = C
        self.opt_cost = sum(C[j, s] for j, s in enumerate(self.opt_of_req))
        self.used.add(target)
        self.assignment.append(target)
        self.cost += inst.server_dist(target, r)
        return target


@dataclass
class MatchingRun:
    assignment: list
    cost: float
    algorithm_id: str
    log: list = field(default_factory=list)


def run_matcher(matcher, instance: MatchingInstance, predictions=None) -> MatchingRun:
    prev: frozenset = frozenset()
    for i, r in enumerate(instance.requests):
        nxt = frozenset(predictions[i]) if predictions is not None else None
        matcher.step(r, prev, nxt)
        prev = nxt
    return MatchingRun(list(matcher.assignment), matcher.cost, matcher.name)


def ftp_matching(instance, predictions) -> MatchingRun:
    return run_matcher(FtpMatcher(instance), instance, predictions)


def permutation_matching(instance) -> MatchingRun:
    return run_matcher(PermutationMatcher(instance), instance)


def min_det_matching(
    instance: MatchingInstance,
    predictions,
    gamma=None,
    robust_cls=PermutationMatcher,
    ftp_cls=FtpMatcher,
    check_distance: bool = True,
) -> MatchingRun:
    """Deterministic combination of the robust matcher with FtP.

    The physical matching is produced by an FtP matcher fed the followed
    algorithm's configuration; switching rebases its correction matching
    onto the newly followed configuration.
    """
    sims = [robust_cls(instance), ftp_cls(instance)]
    sched = DetSchedule(2, gamma)
    phys = FtpMatcher(instance)
    log = []
    followed = 0
    pred_prev: frozenset = frozenset()
    for i, r in enumerate(instance.requests):
        before = [s.config for s in sims]
        if check_distance:
            d = server_set_distance(instance, before[0], before[1])
            if d > sims[0].cost + sims[1].cost + TOL:
                raise InvariantViolation(f"round {i}: configuration distance {d} exceeds summed costs")
        pred = frozenset(predictions[i])
        for s in sims:
            s.step(r, pred_prev, pred)
        pred_prev = pred
        f = sched.choose([s.cost for s in sims])
        if f != followed:
            log.append({"round": i, "from": followed, "to": f})
            followed = f
        phys.step(r, before[f], sims[f].config)
    if check_distance:
        d = server_set_distance(instance, sims[0].config, sims[1].config)
        if d > sims[0].cost + sims[1].cost + TOL:
            raise InvariantViolation("final configuration distance exceeds summed costs")
    run = MatchingRun(list(phys.assignment), phys.cost, "min_det_matching", log)
    run.simulated_costs = [s.cost for s in sims]
    return run


def matching_prediction_error(instance: MatchingInstance, predictions, reference: Sequence[int]):
    """Sum over rounds of the distance between P_i and the reference's first i servers."""
    total = 0
    for i, P in enumerate(predictions, start=1):
        if len(set(P)) != i:
            raise SizeMismatch(f"round {i}: predicted set has {len(set(P))} servers")
        total += server_set_distance(instance, P, reference[:i])
    return total


def brute_force_matching(instance: MatchingInstance):
    """Optimal offline assignment by enumerating all n! permutations."""
    best, best_perm = math.inf, None
    for perm in itertools.permutations(range(instance.n)):
        c = instance.cost_of(perm)
        if c < best:
            best, best_perm = c, list(perm)
    return best, best_perm


def offline_matching(instance: MatchingInstance):
    """Optimal offline assignment (request j -> server) by linear assignment."""
    C = np.array([[instance.server_dist(s, r) for s in range(instance.n)] for r in instance.requests])
    rows, cols = linear_sum_assignment(C)
    assign = [0] * instance.n
    for j, s in zip(rows, cols):
        assign[int(j)] = int(s)
    return instance.cost_of(assign), assign


def prefix_predictions(assignment: Sequence[int]) -> list:
    """Server sets used by an assignment on each prefix of the requests."""
    return [frozenset(assignment[:i]) for i in range(1, len(assignment) + 1)]


# -- instance file ---------------------------------------------------------------


def parse_matching_file(text: str):
    """Parse ``servers:``/``requests:`` lines and optional ``prediction:`` lines.

    Prediction lines, in round order, list 0-based server indices.
    """
    servers = requests = None
    preds = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(":")
        key = key.strip().lower()
        vals = rest.split()
        if key == "servers":
            servers = [_num(v) for v in vals]
        elif key == "requests":
            requests = [_num(v) for v in vals]
        elif key == "prediction":
            preds.append(frozenset(int(v) for v in vals))
        else:
            raise ValueError(f"unknown line {raw!r}")
    if servers is None or requests is None:
        raise ValueError("need both servers: and requests: lines")
    inst = MatchingInstance(tuple(servers), tuple(requests))
    if preds and len(preds) != inst.n:
        raise SizeMismatch(f"{len(preds)} prediction lines for {inst.n} rounds")
    return inst, (preds or None)


def format_matching_file(instance: MatchingInstance, predictions=None) -> str:
    lines = [
        "servers: " + " ".join(map(str, instance.servers)),
        "requests: " + " ".join(map(str, instance.requests)),
    ]
    for P in predictions or ():
        lines.append("prediction: " + " ".join(str(s) for s in sorted(P)))
    return "\n".join(lines) + "\n"


def _num(v: str):
    try:
        return int(v)
    except ValueError:
        return float(v)
